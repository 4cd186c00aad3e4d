/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "gbtopt/bounding.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "gbtopt/parallel.hpp"

namespace gbtopt {

namespace {

/** Leaf count of reduce_tree's output without building it (domain pruning only). */
long reduced_leaf_count(const Tree& t, const NodeDomain& d, const BreakpointGrid& g) {
    long count = 0;
    std::function<void(std::int32_t)> walk = [&](std::int32_t id) {
        const TreeNode& nd = t.nodes[id];
        if (nd.is_leaf()) {
            ++count;
            return;
        }
        int j = grid_index_of(g, nd.var, nd.value);
        if (d.hi[nd.var] <= j) {
            walk(nd.left);
            return;
        }
        if (d.lo[nd.var] >= j) {
            walk(nd.right);
            return;
        }
        walk(nd.left);
        walk(nd.right);
    };
    walk(0);
    return count;
}

long block_leaves(const Block& b, const TreeEnsemble& e, const NodeDomain& d,
                  const BreakpointGrid& g) {
    long s = 0;
    for (int t : b.trees) s += reduced_leaf_count(e.trees[t], d, g);
    return s;
}

} // namespace

Partition root_partition(const TreeEnsemble& e, int subset_size) {
    if (subset_size < 1) throw InputError("subset size must be positive");
    Partition p;
    const int total = static_cast<int>(e.trees.size());
    for (int start = 0; start < total; start += subset_size) {
        Block b;
        b.id = static_cast<int>(p.blocks.size());
        for (int t = start; t < std::min(start + subset_size, total); ++t) b.trees.push_back(t);
        p.blocks.push_back(std::move(b));
    }
    return p;
}

double partition_bound(Partition& p, const TreeEnsemble& e, const NodeDomain& domain,
                       const BreakpointGrid& grid, int threads) {
    auto tag = std::make_shared<const NodeDomain>(domain);
    parallel_for(static_cast<int>(p.blocks.size()), resolve_thread_count(threads), [&](int i) {
        Block& b = p.blocks[i];
        b.bound = solve_subset(e, b.trees, domain, grid).value;
        b.leaves = block_leaves(b, e, domain, grid);
        b.bound_domain = tag;
        b.has_bound = true;
    });
    double total = 0.0;
    for (const Block& b : p.blocks) total += b.bound;
    return total;
}

bool refines(const Partition& a, const Partition& b) {
    std::unordered_map<int, int> owner; // tree id -> block index in b
    long b_total = 0;
    for (std::size_t i = 0; i < b.blocks.size(); ++i)
        for (int t : b.blocks[i].trees) {
            if (!owner.emplace(t, static_cast<int>(i)).second)
                throw InputError("partition has overlapping blocks");
            ++b_total;
        }
    long a_total = 0;
    for (const Block& blk : a.blocks) {
        if (blk.trees.empty()) throw InputError("partition has an empty block");
        auto first = owner.find(blk.trees[0]);
        if (first == owner.end()) throw InputError("partitions cover different tree sets");
        for (int t : blk.trees) {
            ++a_total;
            auto it = owner.find(t);
            if (it == owner.end()) throw InputError("partitions cover different tree sets");
            if (it->second != first->second) return false;
        }
    }
    if (a_total != b_total) throw InputError("partitions cover different tree sets");
    return true;
}

RefineResult refine_partition(const Partition& p, const TreeEnsemble& e,
                              const NodeDomain& domain, const BreakpointGrid& grid,
                              double time_limit_seconds, int threads) {
    Deadline deadline = Deadline::after_seconds(time_limit_seconds);
    std::vector<Block> work = p.blocks;
    for (Block& b : work) {
        b.leaves = block_leaves(b, e, domain, grid);
        if (!b.has_bound) { // precondition slip: fill the cache under this region
            b.bound = solve_subset(e, b.trees, domain, grid).value;
            b.bound_domain = std::make_shared<const NodeDomain>(domain);
            b.has_bound = true;
        }
    }
    std::stable_sort(work.begin(), work.end(), [](const Block& a, const Block& b) {
        if (a.leaves != b.leaves) return a.leaves < b.leaves;
        return a.id < b.id;
    });

    const int k = static_cast<int>(work.size());
    const int max_pairs = k / 2;
    std::vector<Block> merged(max_pairs);
    std::vector<char> done(max_pairs, 0);
    auto tag = std::make_shared<const NodeDomain>(domain);
    parallel_for_prefix(
        max_pairs, resolve_thread_count(threads),
        [&](int) { return deadline.expired(); },
        [&](int pi) {
            const Block& a = work[2 * pi];
            const Block& b = work[2 * pi + 1];
            Block m;
            m.trees.reserve(a.trees.size() + b.trees.size());
            std::merge(a.trees.begin(), a.trees.end(), b.trees.begin(), b.trees.end(),
                       std::back_inserter(m.trees));
            m.bound = solve_subset(e, m.trees, domain, grid).value;
            m.leaves = a.leaves + b.leaves;
            m.bound_domain = tag;
            m.has_bound = true;
            merged[pi] = std::move(m);
            done[pi] = 1;
        });

    RefineResult out;
    if (std::none_of(done.begin(), done.end(), [](char c) { return c != 0; })) {
        // Nothing merged: hand back the input blocks (caches filled) in order.
        out.partition.blocks = std::move(work);
        std::sort(out.partition.blocks.begin(), out.partition.blocks.end(),
                  [](const Block& a, const Block& b) { return a.id < b.id; });
        for (const Block& b : out.partition.blocks) out.bound += b.bound;
        return out;
    }
    for (int pi = 0; pi < max_pairs; ++pi) {
        if (done[pi]) {
            out.partition.blocks.push_back(std::move(merged[pi]));
            ++out.pairs_merged;
        } else {
            out.partition.blocks.push_back(work[2 * pi]);
            out.partition.blocks.push_back(work[2 * pi + 1]);
        }
    }
    if (k % 2 == 1) out.partition.blocks.push_back(work[k - 1]);
    for (std::size_t i = 0; i < out.partition.blocks.size(); ++i) {
        out.partition.blocks[i].id = static_cast<int>(i);
        out.bound += out.partition.blocks[i].bound;
    }
    return out;
}

} // namespace gbtopt
