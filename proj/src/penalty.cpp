/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "gbtopt/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gbtopt/errors.hpp"

namespace gbtopt {

PenaltyModel zero_penalty(int n) {
    PenaltyModel m;
    m.mu.assign(n, 0.0);
    m.sigma.assign(n, 1.0);
    m.loadings = Matrix(n, 0);
    m.lambda = 0.0;
    return m;
}

void validate_penalty(const PenaltyModel& m, int n) {
    if (m.dim() != n || static_cast<int>(m.sigma.size()) != n)
        throw InputError("penalty dimensions do not match the model");
    if (m.loadings.rows != n)
        throw InputError("loading matrix row count does not match the model");
    if (!(m.lambda >= 0) || !std::isfinite(m.lambda))
        throw InputError("lambda must be finite and non-negative");
    for (double s : m.sigma)
        if (!(s > 0) || !std::isfinite(s)) throw InputError("sigma entries must be positive");
    if (m.mixture) {
        std::vector<char> seen(n, 0);
        for (int i : m.mixture->indices) {
            if (i < 0 || i >= n) throw InputError("mixture index out of range");
            if (seen[i]) throw InputError("duplicate mixture index");
            seen[i] = 1;
        }
        if (!std::isfinite(m.mixture->target)) throw InputError("mixture target must be finite");
    }
}

PenaltyModel fit_pca(const Matrix& data, int k) {
    const int p = data.rows, n = data.cols;
    if (p < 2) throw InputError("need at least two data rows to standardize");
    if (k < 1 || k > n)
        throw InputError("component count k must lie in [1, " + std::to_string(n) + "]");
    PenaltyModel m;
    m.mu.assign(n, 0.0);
    m.sigma.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int r = 0; r < p; ++r) s += data.at(r, i);
        m.mu[i] = s / p;
    }
    for (int i = 0; i < n; ++i) {
        double ss = 0.0;
        for (int r = 0; r < p; ++r) {
            double d = data.at(r, i) - m.mu[i];
            ss += d * d;
        }
        if (ss == 0.0)
            throw InputError("zero-variance data column " + std::to_string(i));
        m.sigma[i] = std::sqrt(ss / (p - 1));
    }
    // Correlation matrix of the standardized data.
    Matrix corr(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int r = 0; r < p; ++r)
                s += (data.at(r, i) - m.mu[i]) / m.sigma[i] *
                     ((data.at(r, j) - m.mu[j]) / m.sigma[j]);
            corr.at(i, j) = corr.at(j, i) = s / (p - 1);
        }
    }
    SymmetricEigen eig = symmetric_eigen(corr);
    m.loadings = Matrix(n, k);
    for (int j = 0; j < k; ++j) {
        int arg = 0;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            double mag = std::abs(eig.vectors.at(i, j));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        double sign = eig.vectors.at(arg, j) < 0 ? -1.0 : 1.0;
        for (int i = 0; i < n; ++i) m.loadings.at(i, j) = sign * eig.vectors.at(i, j);
    }
    return m;
}

namespace {

/** u = (I - P) D^{-1} (x - mu); returned by value, size n. */
std::vector<double> residual_off_subspace(const PenaltyModel& m, std::span<const double> x) {
    const int n = m.dim();
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = (x[i] - m.mu[i]) / m.sigma[i];
    std::vector<double> w = mat_t_vec(m.loadings, r);
    std::vector<double> pr = mat_vec(m.loadings, w);
    for (int i = 0; i < n; ++i) r[i] -= pr[i];
    return r;
}

void check_point(const PenaltyModel& m, std::span<const double> x) {
    if (static_cast<int>(x.size()) != m.dim())
        throw InputError("point dimension does not match the penalty");
}

} // namespace

double penalty_eval(const PenaltyModel& m, std::span<const double> x) {
    check_point(m, x);
    double val = 0.0;
    if (m.lambda != 0.0) {
        std::vector<double> u = residual_off_subspace(m, x);
        double ss = 0.0;
        for (double e : u) ss += e * e;
        val = m.lambda * ss;
    }
    if (m.mixture) {
        double s = 0.0;
        for (int i : m.mixture->indices) s += x[i];
        double d = m.mixture->target - s;
        val += d * d;
    }
    return val;
}

std::vector<double> penalty_grad(const PenaltyModel& m, std::span<const double> x) {
    check_point(m, x);
    const int n = m.dim();
    std::vector<double> g(n, 0.0);
    if (m.lambda != 0.0) {
        std::vector<double> u = residual_off_subspace(m, x);
        for (int i = 0; i < n; ++i) g[i] = 2.0 * m.lambda * u[i] / m.sigma[i];
    }
    if (m.mixture) {
        double s = 0.0;
        for (int i : m.mixture->indices) s += x[i];
        double d = 2.0 * (s - m.mixture->target);
        for (int i : m.mixture->indices) g[i] += d;
    }
    return g;
}

std::vector<double> project_to_subspace(const PenaltyModel& m, std::span<const double> x) {
    check_point(m, x);
    const int n = m.dim();
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = (x[i] - m.mu[i]) / m.sigma[i];
    std::vector<double> w = mat_t_vec(m.loadings, r);
    std::vector<double> pr = mat_vec(m.loadings, w);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = m.mu[i] + m.sigma[i] * pr[i];
    return out;
}

BoxMin min_convex_over_box(const PenaltyModel& m, std::span<const double> lower,
                           std::span<const double> upper, const ConvexOptions& opt) {
    const int n = m.dim();
    if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n)
        throw InputError("box dimension does not match the penalty");
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
            throw InputError("box bounds must be finite");
        if (lower[i] > upper[i]) throw InputError("inverted box bounds");
    }
    auto clamp_to_box = [&](std::vector<double>& v) {
        for (int i = 0; i < n; ++i) v[i] = std::clamp(v[i], lower[i], upper[i]);
    };

    BoxMin out;
    out.x.assign(m.mu.begin(), m.mu.end());
    clamp_to_box(out.x);
    out.value = penalty_eval(m, out.x);

    // Curvature cap: Hessian = 2*lambda*D^{-1}(I-P)D^{-1} (+ 2 e_I e_I^T).
    double lcap = 0.0;
    if (m.lambda != 0.0) {
        double smin = *std::min_element(m.sigma.begin(), m.sigma.end());
        lcap += 2.0 * m.lambda / (smin * smin);
    }
    if (m.mixture) lcap += 2.0 * static_cast<double>(m.mixture->indices.size());
    if (lcap == 0.0) {
        out.bound = out.value - opt.backoff;
        return out; // constant function
    }

    double step = 1.0 / lcap;
    std::vector<double> g, y(n), diff(n);
    for (out.iterations = 0; out.iterations < opt.max_iterations; ++out.iterations) {
        g = penalty_grad(m, out.x);
        double resid = 0.0;
        for (int i = 0; i < n; ++i) {
            double pg = out.x[i] - std::clamp(out.x[i] - g[i], lower[i], upper[i]);
            resid += pg * pg;
        }
        if (std::sqrt(resid) <= opt.stationarity_tol) break;

        // Backtrack until the quadratic upper model holds at the trial point.
        double fy;
        for (;;) {
            for (int i = 0; i < n; ++i) {
                y[i] = std::clamp(out.x[i] - step * g[i], lower[i], upper[i]);
                diff[i] = y[i] - out.x[i];
            }
            fy = penalty_eval(m, y);
            double lin = 0.0, quad = 0.0;
            for (int i = 0; i < n; ++i) {
                lin += g[i] * diff[i];
                quad += diff[i] * diff[i];
            }
            if (fy <= out.value + lin + quad / (2.0 * step) + 1e-300) break;
            step *= 0.5;
            if (step < 1e-18) break;
        }
        if (fy >= out.value && step < 1e-18) break; // no further progress possible
        out.x.swap(y);
        out.value = fy;
        step = std::min(step * 1.25, 1e6 / lcap);
    }
    out.bound = out.value - opt.backoff;
    return out;
}

} // namespace gbtopt
