/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gbtopt/branching.hpp"

namespace gbtopt {

struct SolveConfig {
    int subset_size = 0;      // trees per root block; 0 = max(1, tree count / 110)
    int lookahead = 100;      // strong-branching candidates per attempt
    double refine_limit = 120.0; // seconds per refinement pass; <0 = unlimited
    double gap_tol = 1e-6;
    double time_limit = -1.0; // seconds; <0 = unlimited
    long max_nodes = -1;      // processed-node cap; <0 = unlimited
    std::uint64_t seed = 0;   // used by the random branch order
    enum class BranchOrder { Weight, Random } branch_order = BranchOrder::Weight;
    int threads = 0;          // 0 = GBTOPT_THREADS or 1
    bool pruning_enabled = true; // diagnostics: false disables pruning and strong branching
    double prune_margin = 1e-9;
    ConvexOptions convex;
    std::vector<double> initial_x; // optional warm-start point (heuristic seed)
};

/** One row of the bound-evolution log. */
struct BoundEvent {
    double wall_ms = 0.0;
    std::string event; // root | incumbent | lower_bound | final
    long node_id = -1;
    double lb = 0.0;
    double ub = 0.0;
    double gap = 0.0;
};

struct SolveReport {
    std::string status;                // ok | time_limit | node_limit
    double incumbent_value = 0.0;      // f*: best cell-closure value found
    double incumbent_objective = 0.0;  // true objective evaluated at incumbent_x
    std::vector<double> incumbent_x;   // in-box witness (never on an excluded boundary)
    bool has_incumbent = false;
    double lower_bound = 0.0;
    double gap = 0.0;                  // (f* - lb) / max(1e-12, |lb|)
    long nodes_processed = 0;
    long nodes_pruned = 0;
    long strong_branches_taken = 0;
    long refinements = 0;
    double root_ms = 0.0, search_ms = 0.0, total_ms = 0.0;
    std::vector<BoundEvent> events;
};

/**
 * Globally minimize penalty(x) + tree_sum(x) over the box: best-bound search
 * over breakpoint regions with separated convex/tree bounds, partition
 * refinement at each expanded node, strong branching, and incumbent probes at
 * convex minimizers. Reported f* is the closure value of the best cell (the
 * infimum over the cell including its excluded right boundaries).
 */
SolveReport solve(const TreeEnsemble& e, const PenaltyModel& model, const SolveConfig& cfg = {});

inline double relative_gap(double ub, double lb) {
    return (ub - lb) / std::max(1e-12, std::abs(lb));
}

} // namespace gbtopt
