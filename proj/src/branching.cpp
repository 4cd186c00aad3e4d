/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "gbtopt/branching.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>

#include "gbtopt/parallel.hpp"

namespace gbtopt {

std::vector<BranchCandidate> split_weights(const TreeEnsemble& e, const BreakpointGrid& g) {
    std::map<std::pair<int, int>, double> acc; // (var, grid index) -> weight
    for (const Tree& t : e.trees) {
        // Leaves under each node, then one weight contribution per split node.
        std::vector<long> cover(t.nodes.size(), 0);
        std::function<long(std::int32_t)> count = [&](std::int32_t id) -> long {
            const TreeNode& nd = t.nodes[id];
            cover[id] = nd.is_leaf() ? 1 : count(nd.left) + count(nd.right);
            return cover[id];
        };
        long total = count(0);
        for (std::size_t id = 0; id < t.nodes.size(); ++id) {
            const TreeNode& nd = t.nodes[id];
            if (nd.is_leaf()) continue;
            int j = grid_index_of(g, nd.var, nd.value);
            acc[{nd.var, j}] += static_cast<double>(cover[id]) / static_cast<double>(total);
        }
    }
    std::vector<BranchCandidate> out;
    out.reserve(acc.size());
    for (const auto& [key, weight] : acc)
        out.push_back({key.first, g.value_at(key.first, key.second), key.second, weight});
    return out;
}

void order_by_weight(std::vector<BranchCandidate>& c) {
    std::stable_sort(c.begin(), c.end(), [](const BranchCandidate& a, const BranchCandidate& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        if (a.var != b.var) return a.var < b.var;
        return a.index < b.index;
    });
}

void order_randomly(std::vector<BranchCandidate>& c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::shuffle(c.begin(), c.end(), rng);
}

bool candidate_active(const BranchCandidate& c, const NodeDomain& d) {
    return d.lo[c.var] < c.index && c.index < d.hi[c.var];
}

namespace {

NodeDomain split_domain(const NodeDomain& d, const BranchCandidate& c, bool left) {
    NodeDomain out = d;
    if (left)
        out.hi[c.var] = c.index;
    else
        out.lo[c.var] = c.index;
    return out;
}

/** Convex minimum over the region's closed hull. */
BoxMin solve_region(const NodeDomain& d, const PenaltyModel& model, const BreakpointGrid& g,
                    const ConvexOptions& copt) {
    std::vector<double> lo, hi;
    domain_box(d, g, lo, hi);
    return min_convex_over_box(model, lo, hi, copt);
}

} // namespace

StrongBranchResult strong_branch(const NodeState& node,
                                 std::span<const BranchCandidate> ordering, int lookahead,
                                 double incumbent, const PenaltyModel& model,
                                 const BreakpointGrid& grid, const ConvexOptions& copt,
                                 double prune_margin, int threads) {
    StrongBranchResult res;
    if (node.cvx_bound + node.tree_bound > incumbent + prune_margin) {
        res.kind = StrongBranchResult::Kind::NodePrunable;
        return res;
    }
    std::vector<BranchCandidate> active;
    for (const BranchCandidate& c : ordering) {
        if (!candidate_active(c, node.domain)) continue;
        if (!res.has_branch) {
            res.branch = c; // first active: the fallback branch
            res.has_branch = true;
        }
        if (static_cast<int>(active.size()) < lookahead) active.push_back(c);
        if (static_cast<int>(active.size()) >= lookahead && res.has_branch) break;
    }
    if (active.empty()) return res; // NotFound; has_branch=false means the region is a cell

    // The inheriting side keeps the parent's bound, so only the other side
    // can newly become prunable; recompute it per candidate.
    std::vector<double> other_bound(active.size());
    const int workers = resolve_thread_count(threads);
    auto eval_candidate = [&](int i) {
        const BranchCandidate& c = active[i];
        bool left_inherits = node.cvx_x[c.var] < c.value; // tie at threshold inherits right
        NodeDomain other = split_domain(node.domain, c, !left_inherits);
        other_bound[i] = solve_region(other, model, grid, copt).bound;
    };
    if (workers <= 1) {
        for (std::size_t i = 0; i < active.size(); ++i) {
            eval_candidate(static_cast<int>(i));
            res.scanned = static_cast<int>(i) + 1;
            if (other_bound[i] + node.tree_bound > incumbent + prune_margin) break;
        }
    } else {
        parallel_for(static_cast<int>(active.size()), workers, eval_candidate);
        res.scanned = static_cast<int>(active.size());
    }
    for (std::size_t i = 0; i < static_cast<std::size_t>(res.scanned); ++i) {
        if (other_bound[i] + node.tree_bound > incumbent + prune_margin) {
            const BranchCandidate& c = active[i];
            bool left_inherits = node.cvx_x[c.var] < c.value;
            res.kind = StrongBranchResult::Kind::StrongBranch;
            res.branch = c;
            res.survivor = split_domain(node.domain, c, left_inherits);
            return res;
        }
    }
    return res; // NotFound with the first active candidate as fallback
}

ChildPair branch(const NodeState& node, const BranchCandidate& c, const PenaltyModel& model,
                 const BreakpointGrid& grid, const ConvexOptions& copt) {
    if (!candidate_active(c, node.domain))
        throw InputError("branch candidate is not active in the region");
    ChildPair out;
    out.left.domain = split_domain(node.domain, c, true);
    out.right.domain = split_domain(node.domain, c, false);
    out.left.tree_bound = out.right.tree_bound = node.tree_bound;
    out.left_inherits = node.cvx_x[c.var] < c.value; // tie at threshold lands right
    NodeState& inherit = out.left_inherits ? out.left : out.right;
    NodeState& fresh = out.left_inherits ? out.right : out.left;
    inherit.cvx_value = node.cvx_value;
    inherit.cvx_bound = node.cvx_bound;
    inherit.cvx_x = node.cvx_x;
    BoxMin bm = solve_region(fresh.domain, model, grid, copt);
    fresh.cvx_value = bm.value;
    fresh.cvx_bound = bm.bound;
    fresh.cvx_x = std::move(bm.x);
    return out;
}

} // namespace gbtopt
