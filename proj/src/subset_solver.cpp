/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "gbtopt/subset_solver.hpp"

#include <algorithm>
#include <cstring>
#include <functional>
#include <limits>
#include <queue>
#include <unordered_map>

namespace gbtopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/** One reachable leaf with its region (already intersected with the domain). */
struct LeafBox {
    double value;
    int leaf_id;
    NodeDomain box;
};

/** All leaves of t consistent with the region, in leaf-id order. */
std::vector<LeafBox> reachable_leaves(const Tree& t, const NodeDomain& d,
                                      const BreakpointGrid& g) {
    std::vector<LeafBox> out;
    NodeDomain cur = d;
    std::function<void(std::int32_t)> walk = [&](std::int32_t id) {
        const TreeNode& nd = t.nodes[id];
        if (nd.is_leaf()) {
            out.push_back({nd.value, id, cur});
            return;
        }
        int j = grid_index_of(g, nd.var, nd.value);
        if (cur.lo[nd.var] < j) {
            std::int32_t keep = cur.hi[nd.var];
            cur.hi[nd.var] = std::min<std::int32_t>(keep, j);
            walk(nd.left);
            cur.hi[nd.var] = keep;
        }
        if (cur.hi[nd.var] > j) {
            std::int32_t keep = cur.lo[nd.var];
            cur.lo[nd.var] = std::max<std::int32_t>(keep, j);
            walk(nd.right);
            cur.lo[nd.var] = keep;
        }
    };
    walk(0);
    return out;
}

bool intersects(const NodeDomain& a, const NodeDomain& b) {
    for (std::size_t i = 0; i < a.lo.size(); ++i)
        if (std::max(a.lo[i], b.lo[i]) >= std::min(a.hi[i], b.hi[i])) return false;
    return true;
}

NodeDomain intersect(const NodeDomain& a, const NodeDomain& b) {
    NodeDomain r = a;
    for (std::size_t i = 0; i < a.lo.size(); ++i) {
        r.lo[i] = std::max(a.lo[i], b.lo[i]);
        r.hi[i] = std::min(a.hi[i], b.hi[i]);
    }
    return r;
}

/** Minimum value among leaves whose box meets the region; +inf when none. */
double min_compatible(const std::vector<LeafBox>& leaves, const NodeDomain& region) {
    double best = kInf;
    for (const LeafBox& lb : leaves)
        if (lb.value < best && intersects(lb.box, region)) best = lb.value;
    return best;
}

/** Exact dominance key: (depth, region) packed into one vector. */
struct RegionKey {
    std::vector<std::int32_t> packed;
    bool operator==(const RegionKey&) const = default;
};

RegionKey make_key(const NodeDomain& d, int depth) {
    RegionKey k;
    k.packed.reserve(1 + d.lo.size() + d.hi.size());
    k.packed.push_back(depth);
    k.packed.insert(k.packed.end(), d.lo.begin(), d.lo.end());
    k.packed.insert(k.packed.end(), d.hi.begin(), d.hi.end());
    return k;
}

struct RegionKeyHash {
    std::size_t operator()(const RegionKey& k) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int32_t v : k.packed) {
            h ^= static_cast<std::uint32_t>(v);
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

void check_subset(const TreeEnsemble& e, std::span<const int> trees) {
    if (trees.empty()) throw InputError("empty tree subset");
    for (int t : trees)
        if (t < 0 || t >= static_cast<int>(e.trees.size()))
            throw InputError("tree index out of range: " + std::to_string(t));
}

} // namespace

double min_leaf_under_domain(const Tree& t, const NodeDomain& d, const BreakpointGrid& g) {
    double best = kInf;
    NodeDomain cur = d;
    std::function<void(std::int32_t)> walk = [&](std::int32_t id) {
        const TreeNode& nd = t.nodes[id];
        if (nd.is_leaf()) {
            best = std::min(best, nd.value);
            return;
        }
        int j = grid_index_of(g, nd.var, nd.value);
        if (cur.lo[nd.var] < j) {
            std::int32_t keep = cur.hi[nd.var];
            cur.hi[nd.var] = std::min<std::int32_t>(keep, j);
            walk(nd.left);
            cur.hi[nd.var] = keep;
        }
        if (cur.hi[nd.var] > j) {
            std::int32_t keep = cur.lo[nd.var];
            cur.lo[nd.var] = std::max<std::int32_t>(keep, j);
            walk(nd.right);
            cur.lo[nd.var] = keep;
        }
    };
    walk(0);
    return best;
}

SubsetSolution solve_subset(const TreeEnsemble& e, std::span<const int> trees,
                            const NodeDomain& domain, const BreakpointGrid& grid,
                            SearchTrace* trace) {
    check_subset(e, trees);
    const int k = static_cast<int>(trees.size());

    std::vector<std::vector<LeafBox>> leaves(k);
    for (int i = 0; i < k; ++i) leaves[i] = reachable_leaves(e.trees[trees[i]], domain, grid);

    // Process high-spread trees first: they constrain the region fastest.
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::vector<double> spread(k);
    for (int i = 0; i < k; ++i) {
        double lo = kInf, hi = -kInf;
        for (const LeafBox& lb : leaves[i]) {
            lo = std::min(lo, lb.value);
            hi = std::max(hi, lb.value);
        }
        spread[i] = hi - lo;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return spread[a] > spread[b]; });
    if (trace) trace->processing_order = order;

    struct State {
        NodeDomain region;
        std::vector<double> mins; // per processing position >= depth: min compatible leaf
        double acc = 0.0;
        double h = 0.0;
        int depth = 0;
        std::int64_t parent = -1;
        int leaf_id = -1; // leaf chosen to get here (tree order[depth-1])
    };
    std::vector<State> arena;
    arena.reserve(1024);

    struct QEntry {
        double f;
        int depth;
        std::int64_t seq;
        std::int64_t state;
    };
    auto worse = [](const QEntry& a, const QEntry& b) {
        if (a.f != b.f) return a.f > b.f;
        if (a.depth != b.depth) return a.depth < b.depth; // deeper first
        return a.seq > b.seq;
    };
    std::priority_queue<QEntry, std::vector<QEntry>, decltype(worse)> queue(worse);
    std::unordered_map<RegionKey, double, RegionKeyHash> best_acc; // dominance

    State root;
    root.region = domain;
    root.mins.resize(k);
    for (int i = 0; i < k; ++i) {
        root.mins[i] = min_compatible(leaves[order[i]], domain);
        root.h += root.mins[i];
    }
    arena.push_back(std::move(root));
    std::int64_t seq = 0;
    queue.push({arena[0].h, 0, seq++, 0});
    best_acc.emplace(make_key(domain, 0), 0.0);

    std::int64_t goal = -1;
    while (!queue.empty()) {
        QEntry top = queue.top();
        queue.pop();
        const std::int64_t si = top.state;
        if (arena[si].depth == k) {
            goal = si;
            break;
        }
        {
            // A better state for the same (depth, region) superseded this one.
            auto it = best_acc.find(make_key(arena[si].region, arena[si].depth));
            if (it != best_acc.end() && it->second < arena[si].acc) continue;
        }
        if (trace)
            trace->expanded.push_back(
                {arena[si].depth, arena[si].acc, arena[si].h, arena[si].region});
        const int pos = arena[si].depth;
        const int tree_pos = order[pos];
        // Copy out what the expansion reads: pushing children reallocates the arena.
        const NodeDomain region = arena[si].region;
        const double acc = arena[si].acc;
        const std::vector<double> mins = arena[si].mins;
        for (const LeafBox& lb : leaves[tree_pos]) {
            if (!intersects(lb.box, region)) continue;
            State child;
            child.region = intersect(region, lb.box);
            child.acc = acc + lb.value;
            child.depth = pos + 1;
            child.parent = si;
            child.leaf_id = lb.leaf_id;
            RegionKey key = make_key(child.region, child.depth);
            auto it = best_acc.find(key);
            if (it != best_acc.end() && it->second <= child.acc) continue;
            // Completion estimate: refresh only trees the region change can affect.
            child.mins.assign(mins.begin(), mins.end());
            child.h = 0.0;
            for (int i = pos + 1; i < k; ++i) {
                bool narrowed = false;
                for (std::size_t v = 0; v < region.lo.size() && !narrowed; ++v)
                    narrowed = child.region.lo[v] != region.lo[v] ||
                               child.region.hi[v] != region.hi[v];
                if (narrowed) child.mins[i] = min_compatible(leaves[order[i]], child.region);
                child.h += child.mins[i];
            }
            if (it != best_acc.end())
                it->second = child.acc;
            else
                best_acc.emplace(key, child.acc);
            double f = child.acc + child.h;
            arena.push_back(std::move(child));
            queue.push({f, pos + 1, seq++, static_cast<std::int64_t>(arena.size()) - 1});
        }
    }
    if (goal < 0) throw InputError("subset search found no assignment (empty region?)");

    SubsetSolution sol;
    sol.witness = arena[goal].region;
    sol.leaf_choice.assign(k, -1);
    std::int64_t cur = goal;
    while (arena[cur].parent >= 0) {
        sol.leaf_choice[order[arena[cur].depth - 1]] = arena[cur].leaf_id;
        cur = arena[cur].parent;
    }
    // Re-sum in input tree order so the value is bit-identical to an
    // enumeration oracle that adds contributions the same way.
    sol.value = 0.0;
    for (int i = 0; i < k; ++i)
        sol.value += e.trees[trees[i]].nodes[sol.leaf_choice[i]].value;
    return sol;
}

SubsetSolution brute_force_subset(const TreeEnsemble& e, std::span<const int> trees,
                                  const NodeDomain& domain, const BreakpointGrid& grid,
                                  std::uint64_t cap) {
    check_subset(e, trees);
    const int k = static_cast<int>(trees.size());
    std::vector<std::vector<LeafBox>> leaves(k);
    double combos = 1.0;
    for (int i = 0; i < k; ++i) {
        leaves[i] = reachable_leaves(e.trees[trees[i]], domain, grid);
        combos *= static_cast<double>(leaves[i].size());
    }
    if (combos > static_cast<double>(cap))
        throw LimitError("leaf combination count exceeds enumeration cap");

    SubsetSolution best;
    best.value = kInf;
    std::vector<int> pick(k, 0);
    for (;;) {
        // Joint intersection; for interval products this equals the pairwise test.
        NodeDomain region = domain;
        bool feasible = true;
        double value = 0.0;
        for (int i = 0; i < k && feasible; ++i) {
            const LeafBox& lb = leaves[i][pick[i]];
            region = intersect(region, lb.box);
            value += lb.value;
            for (std::size_t v = 0; v < region.lo.size(); ++v)
                if (region.lo[v] >= region.hi[v]) {
                    feasible = false;
                    break;
                }
        }
        if (feasible && value < best.value) {
            best.value = value;
            best.witness = region;
            best.leaf_choice.assign(k, 0);
            for (int i = 0; i < k; ++i) best.leaf_choice[i] = leaves[i][pick[i]].leaf_id;
        }
        int i = k - 1;
        while (i >= 0 && pick[i] + 1 == static_cast<int>(leaves[i].size())) pick[i--] = 0;
        if (i < 0) break;
        ++pick[i];
    }
    if (best.value == kInf) throw InputError("no consistent leaf combination (empty region?)");
    return best;
}

} // namespace gbtopt
