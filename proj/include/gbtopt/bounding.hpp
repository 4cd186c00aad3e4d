/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <memory>
#include <span>
#include <vector>

#include "gbtopt/subset_solver.hpp"

namespace gbtopt {

/** One partition block with its (optional) cached bound. */
struct Block {
    int id = 0;
    std::vector<int> trees; // ascending tree ids
    bool has_bound = false;
    double bound = 0.0;
    long leaves = 0; // reachable-leaf count when the bound was computed
    std::shared_ptr<const NodeDomain> bound_domain; // region the cache is valid for
};

/** Disjoint blocks covering all tree ids of an ensemble. */
struct Partition {
    std::vector<Block> blocks;
};

/** Consecutive blocks of at most subset_size trees; no bounds cached yet. */
Partition root_partition(const TreeEnsemble& e, int subset_size);

/**
 * Sum of exact per-block minima over the region; fills each block's cache
 * (bound, leaf count, region tag). Blocks solve independently, so they run
 * in parallel when threads > 1.
 */
double partition_bound(Partition& p, const TreeEnsemble& e, const NodeDomain& domain,
                       const BreakpointGrid& grid, int threads = 1);

/** True when every block of a is contained in some block of b. */
bool refines(const Partition& a, const Partition& b);

struct RefineResult {
    Partition partition;
    double bound = 0.0;
    int pairs_merged = 0;
};

/**
 * One merge pass: recount each block's reachable leaves under the region,
 * sort blocks ascending by that count (ties by block id), then replace
 * consecutive pairs by their union with a freshly solved bound — at most
 * floor(k/2) pairs, stopping when the time limit expires (no new pair starts
 * after expiry; in-flight pairs complete). Unmerged blocks keep their cached
 * bounds, which must be valid for an ancestor of the region; missing caches
 * are filled under the current region. The result never has a smaller bound
 * than the input caches sum to.
 */
RefineResult refine_partition(const Partition& p, const TreeEnsemble& e,
                              const NodeDomain& domain, const BreakpointGrid& grid,
                              double time_limit_seconds, int threads = 1);

/** Separated bound: convex part plus tree part. */
inline double global_lower_bound(double convex_bound, double tree_bound) {
    return convex_bound + tree_bound;
}

} // namespace gbtopt
