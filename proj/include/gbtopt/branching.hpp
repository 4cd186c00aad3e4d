/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gbtopt/bounding.hpp"
#include "gbtopt/penalty.hpp"

namespace gbtopt {

/** Branching point: interior breakpoint j of a variable, with its weight. */
struct BranchCandidate {
    int var = -1;
    double value = 0.0;
    int index = 0;      // grid index of value in the variable's row
    double weight = 0.0;
};

/**
 * Pseudocost weight per (variable, breakpoint): over all trees splitting
 * there, the leaf count under the split node divided by the tree's total
 * leaf count. Returned in (var, index) order.
 */
std::vector<BranchCandidate> split_weights(const TreeEnsemble& e, const BreakpointGrid& g);

/** Sort descending by weight; ties by (var, index) ascending. */
void order_by_weight(std::vector<BranchCandidate>& c);

/** Seeded uniform shuffle (baseline branch order). */
void order_randomly(std::vector<BranchCandidate>& c, std::uint64_t seed);

/** True when both children of the candidate split are nonempty in d. */
bool candidate_active(const BranchCandidate& c, const NodeDomain& d);

/** Bounds a search node carries: convex part, its minimizer, and tree part. */
struct NodeState {
    NodeDomain domain;
    double cvx_value = 0.0;    // convex minimum over the region's closed hull
    double cvx_bound = 0.0;    // backed-off rigorous version of cvx_value
    std::vector<double> cvx_x; // minimizer attaining cvx_value
    double tree_bound = 0.0;   // partition bound for the region
};

struct StrongBranchResult {
    enum class Kind { NodePrunable, StrongBranch, NotFound } kind = Kind::NotFound;
    bool has_branch = false;  // false only when no candidate is active (region is a cell)
    BranchCandidate branch;   // taken branch, or first active candidate for NotFound
    NodeDomain survivor;      // surviving child region when a strong branch is taken
    int scanned = 0;          // active candidates whose child bound was recomputed
};

/**
 * Try to halve the region without enqueueing both children: scan the first
 * `lookahead` active candidates in ordering order; the child not containing
 * the node's convex minimizer (ties at the threshold fall right) gets a fresh
 * convex bound, and if that plus the node's tree bound exceeds the incumbent
 * by the prune margin, that child is discarded and the sibling — which
 * inherits cvx_value, cvx_bound and cvx_x unchanged — survives. Reports
 * node-prunable when the node's own bound already exceeds the incumbent.
 */
StrongBranchResult strong_branch(const NodeState& node,
                                 std::span<const BranchCandidate> ordering, int lookahead,
                                 double incumbent, const PenaltyModel& model,
                                 const BreakpointGrid& grid, const ConvexOptions& copt = {},
                                 double prune_margin = 1e-9, int threads = 1);

struct ChildPair {
    NodeState left, right;
    bool left_inherits = false; // which child reused the parent's convex state
};

/**
 * Split the region at the candidate. The child containing the parent's convex
 * minimizer inherits the parent's convex state; the other is recomputed. Both
 * inherit tree_bound. Throws InputError on an inactive candidate.
 */
ChildPair branch(const NodeState& node, const BranchCandidate& c, const PenaltyModel& model,
                 const BreakpointGrid& grid, const ConvexOptions& copt = {});

} // namespace gbtopt
