/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <functional>

#include "gbtopt/bb.hpp"

namespace gbtopt {

using Objective = std::function<double(std::span<const double>)>;

/**
 * Full objective penalty(x) + tree_sum(x) as a reusable evaluator. The
 * returned callable owns copies of both inputs, so it stays valid after the
 * arguments go out of scope.
 */
Objective make_objective(const TreeEnsemble& e, const PenaltyModel& model);

/** How the incremental heuristic picks the next trees. */
enum class TreeSelect { TrainingOrder, BestImprovement, Random };

struct IncrementalConfig {
    TreeSelect strategy = TreeSelect::TrainingOrder;
    int step = 10;             // trees added per iteration
    double time_limit = -1.0;  // seconds; <0 = unlimited
    std::uint64_t seed = 0;    // Random strategy
    SolveConfig inner;         // sub-instance solver; gap_tol 0 solves exactly
    IncrementalConfig() { inner.gap_tol = 0.0; }
};

struct HeurIteration {
    int iter = 0;
    double wall_ms = 0.0;
    double value = 0.0; // full objective at that iteration's point
};

struct HeurResult {
    std::vector<double> x;
    double value = 0.0;
    std::string status; // ok | time_limit
    std::vector<HeurIteration> log;
};

/**
 * Grow a sub-ensemble by `step` trees per iteration (strategy: training
 * order / largest contribution at the current point, ties to the lower tree
 * id / seeded random) and solve each sub-instance exactly with the native
 * solver. Returns the recorded point with the best full objective.
 */
HeurResult incremental_minlp(const TreeEnsemble& e, const PenaltyModel& model,
                             const IncrementalConfig& cfg = {});

struct PsoConfig {
    double omega = 0.5, c1 = 0.7, c2 = 0.3;
    int particles = 500;
    int iterations = 100;
    double h = 0.15; // init mix: h * uniform + (1-h) * subspace projection
    std::uint64_t seed = 0;
    double time_limit = -1.0;
    int threads = 0;
};

/**
 * Particle swarm: v <- omega*v + c1*r1*(p - x) + c2*r2*(g - x), x <- x + v
 * clipped to the box, fresh r1, r2 per particle per iteration. Particles
 * start at h * (uniform box sample) + (1-h) * (its projection onto the
 * penalty's loading subspace through mu, sigma). Velocities are clipped to
 * half the box width. Deterministic for a fixed seed.
 */
HeurResult particle_swarm(const Objective& objective, std::span<const double> lower,
                          std::span<const double> upper, const PenaltyModel& model,
                          const PsoConfig& cfg = {});

struct SaConfig {
    double t0 = 1.0;          // initial temperature
    double alpha = 0.9;       // geometric cooling factor, in [0.80, 0.99]
    double prob_const = 1.0;  // c in accept probability exp(-delta / (c T))
    int inner_iters = 100;    // moves per temperature
    double epsilon = 1e-4;    // stop once T <= epsilon
    double step_scale = 0.1;  // Gaussian step std, per component: scale * width
    std::uint64_t seed = 0;
    double time_limit = -1.0;
};

/**
 * Simulated annealing with Gaussian box-clipped moves and geometric cooling;
 * tracks and returns the best point ever visited.
 */
HeurResult simulated_annealing(const Objective& objective, std::span<const double> lower,
                               std::span<const double> upper, const SaConfig& cfg = {});

} // namespace gbtopt
