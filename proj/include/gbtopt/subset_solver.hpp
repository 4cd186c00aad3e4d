/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gbtopt/ensemble.hpp"

namespace gbtopt {

/** Exact minimum of a tree subset's sum over a region. */
struct SubsetSolution {
    double value = 0.0;
    NodeDomain witness;          // sub-region attaining value
    std::vector<int> leaf_choice; // leaf node id per tree, in input subset order
};

/** Optional instrumentation: one entry per expanded search state. */
struct SearchTrace {
    std::vector<int> processing_order; // positions into the subset, as searched
    struct Entry {
        int assigned_count = 0;
        double acc = 0.0;       // sum of chosen leaf values
        double remainder = 0.0; // optimistic completion for the unassigned trees
        NodeDomain region;
    };
    std::vector<Entry> expanded;
};

/**
 * Minimize sum of the listed trees over the region by best-first search on
 * partial leaf assignments; states are interval products, the completion
 * estimate sums each unassigned tree's minimum reachable leaf. Exact and
 * deterministic. Throws InputError on an empty subset or bad tree ids.
 */
SubsetSolution solve_subset(const TreeEnsemble& e, std::span<const int> trees,
                            const NodeDomain& domain, const BreakpointGrid& grid,
                            SearchTrace* trace = nullptr);

/**
 * Reference implementation: enumerate reachable-leaf combinations, reject the
 * inconsistent ones, take the minimum. Throws LimitError when the combination
 * count exceeds cap.
 */
SubsetSolution brute_force_subset(const TreeEnsemble& e, std::span<const int> trees,
                                  const NodeDomain& domain, const BreakpointGrid& grid,
                                  std::uint64_t cap = 10000000);

/**
 * Minimum leaf value reachable in the region (domain and path constraints
 * both honored); equals solve_subset on the singleton subset.
 */
double min_leaf_under_domain(const Tree& t, const NodeDomain& d, const BreakpointGrid& g);

} // namespace gbtopt
