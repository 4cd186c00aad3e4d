/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gbtopt/linalg.hpp"

namespace gbtopt {

/** Optional quadratic addend (target - sum of the listed coordinates)^2. */
struct MixtureTerm {
    std::vector<int> indices;
    double target = 100.0;
};

/**
 * Convex quadratic penalty
 *   lambda * || (I - P) D^{-1} (x - mu) ||^2  (+ mixture addend),
 * with D = diag(sigma) and P the projector onto the span of the loading
 * columns. Loadings may have zero columns (P = 0).
 */
struct PenaltyModel {
    std::vector<double> mu, sigma;
    Matrix loadings; // n x k, orthonormal columns
    double lambda = 0.0;
    std::optional<MixtureTerm> mixture;

    int dim() const { return static_cast<int>(mu.size()); }
    bool is_trivial() const { return lambda == 0.0 && !mixture; }
};

/** Penalty with no effect (used when no training data is supplied). */
PenaltyModel zero_penalty(int n);

/** Throws InputError when dimensions or mixture indices are inconsistent. */
void validate_penalty(const PenaltyModel& m, int n);

/**
 * Standardize the data (p x n; p >= 2 rows), eigendecompose the correlation
 * matrix, keep the k leading components. Deterministic: eigenvalues sorted
 * non-increasing, each loading's largest-magnitude entry made positive.
 * Throws InputError on a zero-variance column (named) or k outside [1, n].
 * lambda is left 0 for the caller to set.
 */
PenaltyModel fit_pca(const Matrix& data, int k);

double penalty_eval(const PenaltyModel& m, std::span<const double> x);
std::vector<double> penalty_grad(const PenaltyModel& m, std::span<const double> x);

/** mu + sigma .* P((x - mu) ./ sigma): x mapped onto the loading subspace. */
std::vector<double> project_to_subspace(const PenaltyModel& m, std::span<const double> x);

struct ConvexOptions {
    double stationarity_tol = 1e-7;
    double backoff = 1e-8; // subtracted from the value to form the rigorous bound
    int max_iterations = 200000;
};

struct BoxMin {
    std::vector<double> x;  // box-feasible minimizer
    double value;           // penalty at x
    double bound;           // value - backoff: rigorous lower bound on the box minimum
    int iterations = 0;
};

/**
 * Minimize the penalty over a closed box by projected gradient descent with
 * backtracking. Returns once the unit-step projected-gradient residual is
 * below stationarity_tol. Throws InputError on non-finite or inverted bounds.
 */
BoxMin min_convex_over_box(const PenaltyModel& m, std::span<const double> lower,
                           std::span<const double> upper, const ConvexOptions& opt = {});

} // namespace gbtopt
