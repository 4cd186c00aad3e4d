/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "gbtopt/bb.hpp"

#include <chrono>
#include <limits>
#include <memory>
#include <queue>

#include "gbtopt/parallel.hpp"

namespace gbtopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct BBNode {
    NodeState st;
    std::shared_ptr<const Partition> part;
    long id = 0;

    double bound() const { return st.cvx_bound + st.tree_bound; }
};

/** Move coordinates off excluded cell boundaries so evaluation stays in-cell. */
std::vector<double> nudge_into_cell(const std::vector<double>& x, const NodeDomain& cell,
                                    const BreakpointGrid& g) {
    std::vector<double> out = x;
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = cell.hi[i];
        if (hi != g.last_index(static_cast<int>(i)) &&
            out[i] >= g.value_at(static_cast<int>(i), hi))
            out[i] = 0.5 * (g.value_at(static_cast<int>(i), cell.lo[i]) +
                            g.value_at(static_cast<int>(i), hi));
    }
    return out;
}

} // namespace

SolveReport solve(const TreeEnsemble& e, const PenaltyModel& model, const SolveConfig& cfg) {
    validate_penalty(model, e.n);
    const Clock::time_point t0 = Clock::now();
    Deadline deadline = cfg.time_limit >= 0 ? Deadline::after_seconds(cfg.time_limit)
                                            : Deadline::unlimited();
    const int threads = resolve_thread_count(cfg.threads);
    const int tree_count = static_cast<int>(e.trees.size());
    const int subset = cfg.subset_size > 0 ? cfg.subset_size : std::max(1, tree_count / 110);
    const int lookahead = cfg.pruning_enabled ? cfg.lookahead : 0;

    BreakpointGrid grid = extract_breakpoints(e);

    SolveReport rep;
    rep.status = "ok";
    rep.incumbent_value = kInf;
    rep.incumbent_objective = kInf;
    rep.lower_bound = -kInf;

    auto log_event = [&](const char* ev, long node) {
        BoundEvent be;
        be.wall_ms = ms_since(t0);
        be.event = ev;
        be.node_id = node;
        be.lb = rep.lower_bound;
        be.ub = rep.incumbent_value;
        be.gap = rep.has_incumbent ? relative_gap(rep.incumbent_value, rep.lower_bound) : kInf;
        rep.events.push_back(std::move(be));
    };

    // Probe a feasible point; keep f* as the best value seen.
    auto probe = [&](const std::vector<double>& x, long node) {
        double val = penalty_eval(model, x) + evaluate_ensemble(e, x);
        if (val < rep.incumbent_value) {
            rep.incumbent_value = val;
            rep.incumbent_objective = val;
            rep.incumbent_x = x;
            rep.has_incumbent = true;
            log_event("incumbent", node);
        }
    };

    std::vector<BranchCandidate> ordering = split_weights(e, grid);
    if (cfg.branch_order == SolveConfig::BranchOrder::Random)
        order_randomly(ordering, cfg.seed);
    else
        order_by_weight(ordering);

    // Root bounds.
    BBNode root;
    root.st.domain = root_domain(grid);
    {
        std::vector<double> lo, hi;
        domain_box(root.st.domain, grid, lo, hi);
        BoxMin bm = min_convex_over_box(model, lo, hi, cfg.convex);
        root.st.cvx_value = bm.value;
        root.st.cvx_bound = bm.bound;
        root.st.cvx_x = std::move(bm.x);
    }
    if (tree_count > 0) {
        Partition p = root_partition(e, subset);
        root.st.tree_bound = partition_bound(p, e, root.st.domain, grid, threads);
        root.part = std::make_shared<const Partition>(std::move(p));
    }
    if (!cfg.initial_x.empty()) {
        if (static_cast<int>(cfg.initial_x.size()) != e.n)
            throw InputError("warm-start point has wrong dimension");
        for (int i = 0; i < e.n; ++i)
            if (cfg.initial_x[i] < e.lower[i] || cfg.initial_x[i] > e.upper[i])
                throw InputError("warm-start point lies outside the box");
        probe(cfg.initial_x, -1);
    }
    probe(root.st.cvx_x, 0);
    rep.lower_bound = root.bound();
    log_event("root", 0);
    rep.root_ms = ms_since(t0);

    auto cmp = [](const std::pair<double, long>& a, const std::pair<double, long>& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second > b.second;
    };
    std::priority_queue<std::pair<double, long>, std::vector<std::pair<double, long>>,
                        decltype(cmp)>
        open(cmp);
    std::vector<BBNode> nodes;
    nodes.push_back(std::move(root));
    open.push({nodes[0].bound(), 0});
    long next_id = 1;

    auto prunable = [&](double bound) {
        return cfg.pruning_enabled && rep.has_incumbent &&
               bound > rep.incumbent_value + cfg.prune_margin;
    };

    // Closure value of a single-cell node; the node's convex state is already
    // exact for the cell (computed on it, or inherited with its minimizer inside).
    auto finalize_cell = [&](const BBNode& nd) {
        double tree_val = tree_count > 0 ? ensemble_value_on_cell(e, nd.st.domain, grid) : 0.0;
        double total = nd.st.cvx_value + tree_val;
        if (total < rep.incumbent_value) {
            std::vector<double> witness = model.is_trivial()
                                              ? domain_representative(nd.st.domain, grid)
                                              : nudge_into_cell(nd.st.cvx_x, nd.st.domain, grid);
            rep.incumbent_value = total;
            rep.incumbent_x = std::move(witness);
            rep.incumbent_objective =
                penalty_eval(model, rep.incumbent_x) + evaluate_ensemble(e, rep.incumbent_x);
            rep.has_incumbent = true;
            log_event("incumbent", nd.id);
        }
    };

    bool exhausted = false;
    while (true) {
        if (open.empty()) {
            exhausted = true;
            break;
        }
        if (deadline.expired()) {
            rep.status = "time_limit";
            break;
        }
        if (cfg.max_nodes >= 0 && rep.nodes_processed >= cfg.max_nodes) {
            rep.status = "node_limit";
            break;
        }
        auto [bound, id] = open.top();
        open.pop();
        if (bound > rep.lower_bound) {
            rep.lower_bound = std::min(bound, rep.incumbent_value);
            log_event("lower_bound", id);
        }
        if (rep.has_incumbent &&
            relative_gap(rep.incumbent_value, rep.lower_bound) <= cfg.gap_tol)
            break;
        if (prunable(bound)) {
            ++rep.nodes_pruned;
            continue;
        }
        ++rep.nodes_processed;
        BBNode cur = std::move(nodes[id]);

        // Strong branching: keep halving while one child proves prunable.
        StrongBranchResult sbr;
        while (!is_cell(cur.st.domain)) {
            sbr = strong_branch(cur.st, ordering, lookahead, rep.incumbent_value, model, grid,
                                cfg.convex, cfg.prune_margin, threads);
            if (sbr.kind == StrongBranchResult::Kind::StrongBranch) {
                cur.st.domain = sbr.survivor;
                ++rep.strong_branches_taken;
                continue;
            }
            break;
        }
        if (sbr.kind == StrongBranchResult::Kind::NodePrunable) {
            ++rep.nodes_pruned;
            continue;
        }
        if (is_cell(cur.st.domain)) {
            finalize_cell(cur);
            continue;
        }

        // Tighten the tree bound by one refinement pass, then probe x*.
        if (tree_count > 0) {
            RefineResult rr = refine_partition(*cur.part, e, cur.st.domain, grid,
                                               cfg.refine_limit, threads);
            ++rep.refinements;
            cur.st.tree_bound = std::max(cur.st.tree_bound, rr.bound);
            cur.part = std::make_shared<const Partition>(std::move(rr.partition));
        }
        probe(cur.st.cvx_x, cur.id);
        if (prunable(cur.bound())) {
            ++rep.nodes_pruned;
            continue;
        }

        ChildPair kids = branch(cur.st, sbr.branch, model, grid, cfg.convex);
        for (NodeState* st : {&kids.left, &kids.right}) {
            // A child's region is smaller, so the parent's bound stays valid;
            // taking the max keeps bounds monotone along any descent.
            st->cvx_bound = std::max(st->cvx_bound, cur.st.cvx_bound);
            double child_bound = st->cvx_bound + st->tree_bound;
            if (prunable(child_bound)) {
                ++rep.nodes_pruned;
                continue;
            }
            BBNode child;
            child.st = std::move(*st);
            child.part = cur.part;
            child.id = next_id++;
            nodes.push_back(std::move(child));
            open.push({child_bound, nodes.back().id});
        }
    }

    if (exhausted && rep.has_incumbent) rep.lower_bound = rep.incumbent_value;
    rep.gap = rep.has_incumbent ? relative_gap(rep.incumbent_value, rep.lower_bound) : kInf;
    if (rep.gap < 0) rep.gap = 0.0;
    log_event("final", -1);
    rep.total_ms = ms_since(t0);
    rep.search_ms = rep.total_ms - rep.root_ms;
    return rep;
}

} // namespace gbtopt
