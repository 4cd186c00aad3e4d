/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gbtopt/errors.hpp"

namespace gbtopt {

/** Minimal dense row-major matrix; just enough for the penalty model. */
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a; // rows*cols, row-major

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

/** y = M x (x has M.cols entries). */
inline std::vector<double> mat_vec(const Matrix& m, const std::vector<double>& x) {
    std::vector<double> y(m.rows, 0.0);
    for (int r = 0; r < m.rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < m.cols; ++c) s += m.at(r, c) * x[c];
        y[r] = s;
    }
    return y;
}

/** y = M^T x (x has M.rows entries). */
inline std::vector<double> mat_t_vec(const Matrix& m, const std::vector<double>& x) {
    std::vector<double> y(m.cols, 0.0);
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) y[c] += m.at(r, c) * x[r];
    return y;
}

struct SymmetricEigen {
    std::vector<double> values; // descending
    Matrix vectors;             // column j pairs with values[j]; orthonormal
};

/**
 * Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
 * Deterministic; intended for the small matrices this library works with.
 */
inline SymmetricEigen symmetric_eigen(const Matrix& s, int max_sweeps = 100, double tol = 1e-14) {
    if (s.rows != s.cols) throw InputError("symmetric_eigen: matrix must be square");
    const int n = s.rows;
    Matrix a = s;
    Matrix v(n, n);
    for (int i = 0; i < n; ++i) v.at(i, i) = 1.0;

    double norm = 0.0;
    for (double e : a.a) norm += e * e;
    norm = std::sqrt(norm);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
        if (std::sqrt(off) <= tol * (norm > 0 ? norm : 1.0)) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a.at(p, q);
                if (apq == 0.0) continue;
                double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double snm = t * c;
                for (int i = 0; i < n; ++i) {
                    double aip = a.at(i, p), aiq = a.at(i, q);
                    a.at(i, p) = c * aip - snm * aiq;
                    a.at(i, q) = snm * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    double api = a.at(p, i), aqi = a.at(q, i);
                    a.at(p, i) = c * api - snm * aqi;
                    a.at(q, i) = snm * api + c * aqi;
                }
                for (int i = 0; i < n; ++i) {
                    double vip = v.at(i, p), viq = v.at(i, q);
                    v.at(i, p) = c * vip - snm * viq;
                    v.at(i, q) = snm * vip + c * viq;
                }
            }
        }
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return a.at(x, x) > a.at(y, y); });
    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.values[j] = a.at(order[j], order[j]);
        for (int i = 0; i < n; ++i) out.vectors.at(i, j) = v.at(i, order[j]);
    }
    return out;
}

} // namespace gbtopt
