/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "gbtopt/heuristics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "gbtopt/parallel.hpp"

namespace gbtopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

} // namespace

Objective make_objective(const TreeEnsemble& e, const PenaltyModel& model) {
    // Capture copies: the evaluator routinely outlives the call site's locals.
    return [e, model](std::span<const double> x) {
        return penalty_eval(model, x) + evaluate_ensemble(e, x);
    };
}

HeurResult incremental_minlp(const TreeEnsemble& e, const PenaltyModel& model,
                             const IncrementalConfig& cfg) {
    if (cfg.step < 1) throw InputError("incremental step must be at least 1");
    validate_penalty(model, e.n);
    const Clock::time_point t0 = Clock::now();
    Deadline deadline = cfg.time_limit >= 0 ? Deadline::after_seconds(cfg.time_limit)
                                            : Deadline::unlimited();
    const int total = static_cast<int>(e.trees.size());
    std::mt19937_64 rng(cfg.seed);

    HeurResult res;
    res.status = "ok";
    res.value = kInf;
    std::vector<double> latest; // x^(k): the most recent iterate, used by BI
    auto record = [&](int iter, const std::vector<double>& x) {
        double val = penalty_eval(model, x) + evaluate_ensemble(e, x);
        res.log.push_back({iter, ms_since(t0), val});
        latest = x;
        if (val < res.value) {
            res.value = val;
            res.x = x;
        }
    };

    // Iteration 0: no trees, just the convex part over the box.
    {
        BoxMin bm = min_convex_over_box(model, e.lower, e.upper, cfg.inner.convex);
        record(0, bm.x);
    }

    std::vector<char> picked(total, 0);
    std::vector<int> selected;
    selected.reserve(total);
    int iter = 0;
    while (static_cast<int>(selected.size()) < total) {
        if (deadline.expired()) {
            res.status = "time_limit";
            break;
        }
        ++iter;
        std::vector<int> fresh;
        const int want = std::min(cfg.step, total - static_cast<int>(selected.size()));
        switch (cfg.strategy) {
        case TreeSelect::TrainingOrder:
            for (int t = 0; t < total && static_cast<int>(fresh.size()) < want; ++t)
                if (!picked[t]) fresh.push_back(t);
            break;
        case TreeSelect::BestImprovement: {
            // Largest contribution at the current point; ties to the lower id.
            std::vector<int> rest;
            for (int t = 0; t < total; ++t)
                if (!picked[t]) rest.push_back(t);
            std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) {
                return evaluate_tree(e.trees[a], latest) > evaluate_tree(e.trees[b], latest);
            });
            fresh.assign(rest.begin(), rest.begin() + want);
            break;
        }
        case TreeSelect::Random: {
            std::vector<int> rest;
            for (int t = 0; t < total; ++t)
                if (!picked[t]) rest.push_back(t);
            std::shuffle(rest.begin(), rest.end(), rng);
            fresh.assign(rest.begin(), rest.begin() + want);
            break;
        }
        }
        for (int t : fresh) {
            picked[t] = 1;
            selected.push_back(t);
        }

        // Sub-instance: the selected trees over the full box.
        TreeEnsemble sub;
        sub.n = e.n;
        sub.lower = e.lower;
        sub.upper = e.upper;
        std::vector<int> ordered(selected);
        std::sort(ordered.begin(), ordered.end());
        for (int t : ordered) sub.trees.push_back(e.trees[t]);
        SolveConfig inner = cfg.inner;
        if (cfg.time_limit >= 0) {
            double remaining =
                std::max(0.0, cfg.time_limit - ms_since(t0) / 1000.0);
            inner.time_limit = inner.time_limit < 0
                                   ? remaining
                                   : std::min(inner.time_limit, remaining);
        }
        SolveReport sub_rep = solve(sub, model, inner);
        if (sub_rep.has_incumbent) record(iter, sub_rep.incumbent_x);
        if (sub_rep.status != "ok" && deadline.expired()) {
            res.status = "time_limit";
            break;
        }
    }
    return res;
}

HeurResult particle_swarm(const Objective& objective, std::span<const double> lower,
                          std::span<const double> upper, const PenaltyModel& model,
                          const PsoConfig& cfg) {
    if (cfg.particles < 1) throw InputError("need at least one particle");
    if (cfg.h < 0 || cfg.h > 1) throw InputError("projection mix h must lie in [0,1]");
    if (cfg.omega < 0 || cfg.c1 < 0 || cfg.c2 < 0)
        throw InputError("pso coefficients must be non-negative");
    const int n = static_cast<int>(lower.size());
    const Clock::time_point t0 = Clock::now();
    Deadline deadline = cfg.time_limit >= 0 ? Deadline::after_seconds(cfg.time_limit)
                                            : Deadline::unlimited();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<double> width(n);
    for (int i = 0; i < n; ++i) width[i] = upper[i] - lower[i];

    const int m = cfg.particles;
    std::vector<std::vector<double>> x(m), v(m), best(m);
    std::vector<double> best_val(m);
    for (int p = 0; p < m; ++p) {
        std::vector<double> u(n);
        for (int i = 0; i < n; ++i) u[i] = lower[i] + unit(rng) * width[i];
        std::vector<double> proj = project_to_subspace(model, u);
        x[p].resize(n);
        for (int i = 0; i < n; ++i)
            x[p][i] = std::clamp(cfg.h * u[i] + (1.0 - cfg.h) * proj[i], lower[i], upper[i]);
        v[p].resize(n);
        for (int i = 0; i < n; ++i) v[p][i] = (unit(rng) - 0.5) * width[i];
        best[p] = x[p];
        best_val[p] = objective(x[p]);
    }
    int g = 0;
    for (int p = 1; p < m; ++p)
        if (best_val[p] < best_val[g]) g = p;

    HeurResult res;
    res.status = "ok";
    res.x = best[g];
    res.value = best_val[g];
    res.log.push_back({0, ms_since(t0), res.value});

    const int workers = resolve_thread_count(cfg.threads);
    std::vector<double> r1(m), r2(m), val(m);
    for (int k = 1; k <= cfg.iterations; ++k) {
        if (deadline.expired()) {
            res.status = "time_limit";
            break;
        }
        // Particles only read last iteration's global best, so the moves and
        // evaluations are independent; randoms are drawn up front to keep the
        // trajectory identical at any worker count.
        for (int p = 0; p < m; ++p) {
            r1[p] = unit(rng);
            r2[p] = unit(rng);
        }
        parallel_for(m, workers, [&](int p) {
            for (int i = 0; i < n; ++i) {
                double vi = cfg.omega * v[p][i] + cfg.c1 * r1[p] * (best[p][i] - x[p][i]) +
                            cfg.c2 * r2[p] * (res.x[i] - x[p][i]);
                vi = std::clamp(vi, -0.5 * width[i], 0.5 * width[i]);
                v[p][i] = vi;
                x[p][i] = std::clamp(x[p][i] + vi, lower[i], upper[i]);
            }
            val[p] = objective(x[p]);
        });
        for (int p = 0; p < m; ++p) {
            if (val[p] < best_val[p]) {
                best_val[p] = val[p];
                best[p] = x[p];
            }
        }
        // Global best: lowest particle index wins ties.
        int arg = 0;
        for (int p = 1; p < m; ++p)
            if (best_val[p] < best_val[arg]) arg = p;
        if (best_val[arg] < res.value) {
            res.value = best_val[arg];
            res.x = best[arg];
        }
        res.log.push_back({k, ms_since(t0), res.value});
    }
    return res;
}

HeurResult simulated_annealing(const Objective& objective, std::span<const double> lower,
                               std::span<const double> upper, const SaConfig& cfg) {
    if (cfg.alpha < 0.80 || cfg.alpha > 0.99)
        throw InputError("cooling factor alpha must lie in [0.80, 0.99]");
    if (cfg.inner_iters < 1) throw InputError("inner iteration count must be positive");
    const int n = static_cast<int>(lower.size());
    const Clock::time_point t0 = Clock::now();
    Deadline deadline = cfg.time_limit >= 0 ? Deadline::after_seconds(cfg.time_limit)
                                            : Deadline::unlimited();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> cur(n);
    for (int i = 0; i < n; ++i) cur[i] = lower[i] + unit(rng) * (upper[i] - lower[i]);
    double cur_val = objective(cur);

    HeurResult res;
    res.status = "ok";
    res.x = cur;
    res.value = cur_val;
    int iter = 0;
    res.log.push_back({iter, ms_since(t0), res.value});

    std::vector<double> cand(n);
    for (double temp = cfg.t0; temp > cfg.epsilon; temp *= cfg.alpha) {
        if (deadline.expired()) {
            res.status = "time_limit";
            break;
        }
        for (int r = 0; r < cfg.inner_iters; ++r) {
            for (int i = 0; i < n; ++i) {
                double step = cfg.step_scale * (upper[i] - lower[i]) * gauss(rng);
                cand[i] = std::clamp(cur[i] + step, lower[i], upper[i]);
            }
            double val = objective(cand);
            double delta = val - cur_val;
            if (delta <= 0 || std::exp(-delta / (cfg.prob_const * temp)) > unit(rng)) {
                cur = cand;
                cur_val = val;
                if (cur_val < res.value) {
                    res.value = cur_val;
                    res.x = cur;
                }
            }
        }
        ++iter;
        res.log.push_back({iter, ms_since(t0), res.value});
    }
    return res;
}

} // namespace gbtopt
