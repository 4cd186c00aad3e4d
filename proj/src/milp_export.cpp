/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "gbtopt/milp_export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "gbtopt/version.hpp"

namespace gbtopt {

namespace {

std::string fmt(double v) {
    if (v == 0.0) v = 0.0; // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string xname(int i) { return "x_" + std::to_string(i); }
std::string yname(int i, int j) { return "y_" + std::to_string(i) + "_" + std::to_string(j); }
std::string zname(int t, int l) { return "z_" + std::to_string(t) + "_" + std::to_string(l); }

/** Linear expression builder with deterministic "a + b - c" spacing. */
struct Expr {
    std::string text;
    void add(double coef, const std::string& var) {
        if (coef == 0.0) return;
        double mag = std::abs(coef);
        if (text.empty())
            text += (coef < 0 ? "- " : "");
        else
            text += (coef < 0 ? " - " : " + ");
        if (mag == 1.0)
            text += var;
        else
            text += fmt(mag) + " " + var;
    }
    void add_const(double v) {
        if (v == 0.0) return;
        if (text.empty())
            text += (v < 0 ? "- " : "") + fmt(std::abs(v));
        else
            text += (v < 0 ? " - " : " + ") + fmt(std::abs(v));
    }
};

/** Leaves under each subtree, used for the activation rows. */
void collect_leaves(const Tree& t, std::int32_t id, std::vector<int>& out) {
    const TreeNode& nd = t.nodes[id];
    if (nd.is_leaf()) {
        out.push_back(id);
        return;
    }
    collect_leaves(t, nd.left, out);
    collect_leaves(t, nd.right, out);
}

/** Quadratic part of the penalty: Q, linear term, constant (objective = x'Qx + c'x + const). */
struct QuadObjective {
    Matrix q;
    std::vector<double> linear;
    double constant = 0.0;
};

QuadObjective quad_objective(const PenaltyModel& m) {
    const int n = m.dim();
    QuadObjective out;
    out.q = Matrix(n, n);
    out.linear.assign(n, 0.0);
    if (m.lambda != 0.0) {
        // A = lambda * D^{-1} (I - P) D^{-1}, P from the loading columns.
        Matrix p(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double s = 0.0;
                for (int c = 0; c < m.loadings.cols; ++c)
                    s += m.loadings.at(a, c) * m.loadings.at(b, c);
                p.at(a, b) = s;
            }
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double ident = a == b ? 1.0 : 0.0;
                out.q.at(a, b) = m.lambda * (ident - p.at(a, b)) / (m.sigma[a] * m.sigma[b]);
            }
        std::vector<double> qmu = mat_vec(out.q, m.mu);
        for (int a = 0; a < n; ++a) out.linear[a] -= 2.0 * qmu[a];
        double mm = 0.0;
        for (int a = 0; a < n; ++a) mm += m.mu[a] * qmu[a];
        out.constant += mm;
    }
    if (m.mixture) {
        for (int a : m.mixture->indices) {
            for (int b : m.mixture->indices) out.q.at(a, b) += 1.0;
            out.linear[a] -= 2.0 * m.mixture->target;
        }
        out.constant += m.mixture->target * m.mixture->target;
    }
    return out;
}

} // namespace

std::string export_milp(const TreeEnsemble& e, const BreakpointGrid& g,
                        const PenaltyModel& model) {
    validate_penalty(model, e.n);
    QuadObjective qo = quad_objective(model);
    std::ostringstream os;
    os << "\\ gbtopt equivalent mixed-integer model, lp format version "
       << kLpFormatVersion << "\n";
    os << "\\ variables: x_<var>, y_<var>_<breakpoint>, z_<tree>_<leaf node>\n";
    os << "Minimize\n obj: ";
    Expr obj;
    for (int i = 0; i < e.n; ++i) obj.add(qo.linear[i], xname(i));
    for (std::size_t t = 0; t < e.trees.size(); ++t)
        for (std::size_t l = 0; l < e.trees[t].nodes.size(); ++l)
            if (e.trees[t].nodes[l].is_leaf())
                obj.add(e.trees[t].nodes[l].value,
                        zname(static_cast<int>(t), static_cast<int>(l)));
    obj.add_const(qo.constant);
    std::string quad;
    for (int i = 0; i < e.n; ++i) {
        for (int j = i; j < e.n; ++j) {
            double coef = i == j ? 2.0 * qo.q.at(i, i) : 4.0 * qo.q.at(i, j);
            if (coef == 0.0) continue;
            if (!quad.empty()) quad += coef < 0 ? " - " : " + ";
            else if (coef < 0) quad += "- ";
            quad += fmt(std::abs(coef)) + " " + xname(i);
            quad += i == j ? " ^ 2" : " * " + xname(j);
        }
    }
    if (obj.text.empty() && quad.empty()) obj.text = "0 " + xname(0);
    os << obj.text;
    if (!quad.empty()) os << (obj.text.empty() ? "" : " + ") << "[ " << quad << " ] / 2";
    os << "\n";

    os << "Subject To\n";
    for (std::size_t t = 0; t < e.trees.size(); ++t) {
        Expr row;
        for (std::size_t l = 0; l < e.trees[t].nodes.size(); ++l)
            if (e.trees[t].nodes[l].is_leaf())
                row.add(1.0, zname(static_cast<int>(t), static_cast<int>(l)));
        os << " leaf_" << t << ": " << row.text << " = 1\n";
    }
    for (std::size_t t = 0; t < e.trees.size(); ++t) {
        const Tree& tree = e.trees[t];
        for (std::size_t s = 0; s < tree.nodes.size(); ++s) {
            const TreeNode& nd = tree.nodes[s];
            if (nd.is_leaf()) continue;
            int j = grid_index_of(g, nd.var, nd.value);
            std::vector<int> leaves;
            collect_leaves(tree, nd.left, leaves);
            Expr left;
            for (int l : leaves) left.add(1.0, zname(static_cast<int>(t), l));
            left.add(-1.0, yname(nd.var, j));
            os << " left_" << t << "_" << s << ": " << left.text << " <= 0\n";
            leaves.clear();
            collect_leaves(tree, nd.right, leaves);
            Expr right;
            for (int l : leaves) right.add(1.0, zname(static_cast<int>(t), l));
            right.add(1.0, yname(nd.var, j));
            os << " right_" << t << "_" << s << ": " << right.text << " <= 1\n";
        }
    }
    for (int i = 0; i < e.n; ++i)
        for (int j = 1; j + 1 <= g.interior_count(i); ++j)
            os << " order_" << i << "_" << j << ": " << yname(i, j) << " - " << yname(i, j + 1)
               << " <= 0\n";
    for (int i = 0; i < e.n; ++i) {
        const int m = g.interior_count(i);
        Expr lo;
        lo.add(1.0, xname(i));
        for (int j = 1; j <= m; ++j)
            lo.add(g.value_at(i, j) - g.value_at(i, j - 1), yname(i, j));
        os << " linklo_" << i << ": " << lo.text << " >= " << fmt(g.value_at(i, m)) << "\n";
        Expr up;
        up.add(1.0, xname(i));
        for (int j = 1; j <= m; ++j)
            up.add(g.value_at(i, j + 1) - g.value_at(i, j), yname(i, j));
        os << " linkup_" << i << ": " << up.text << " <= " << fmt(g.value_at(i, m + 1)) << "\n";
    }
    os << "Bounds\n";
    for (int i = 0; i < e.n; ++i)
        os << " " << fmt(e.lower[i]) << " <= " << xname(i) << " <= " << fmt(e.upper[i]) << "\n";
    bool any_y = false;
    for (int i = 0; i < e.n; ++i) any_y = any_y || g.interior_count(i) > 0;
    if (any_y) {
        os << "Binary\n";
        for (int i = 0; i < e.n; ++i)
            for (int j = 1; j <= g.interior_count(i); ++j) os << " " << yname(i, j) << "\n";
    }
    os << "End\n";
    return os.str();
}

double milp_objective(const TreeEnsemble& e, const BreakpointGrid& g, const PenaltyModel& model,
                      const MilpAssignment& a) {
    (void)g;
    QuadObjective qo = quad_objective(model);
    double val = qo.constant;
    for (int i = 0; i < e.n; ++i) {
        val += qo.linear[i] * a.x[i];
        for (int j = 0; j < e.n; ++j) val += a.x[i] * qo.q.at(i, j) * a.x[j];
    }
    for (const auto& [key, zv] : a.z) {
        const auto& [t, l] = key;
        val += e.trees[t].nodes[l].value * zv;
    }
    return val;
}

CheckVerdict check_solution(const TreeEnsemble& e, const BreakpointGrid& g,
                            const PenaltyModel& model, const MilpAssignment& a, double tol) {
    CheckVerdict v;
    auto flag = [&](const std::string& row, double amount) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " violated by %.3g", amount);
        v.violations.push_back(row + buf);
        v.consistent = false;
    };
    if (static_cast<int>(a.x.size()) != e.n) throw InputError("assignment x has wrong dimension");
    auto yval = [&](int i, int j) {
        auto it = a.y.find({i, j});
        if (it == a.y.end())
            throw InputError("assignment is missing " + yname(i, j));
        return it->second;
    };
    auto zval = [&](int t, int l) {
        auto it = a.z.find({t, l});
        if (it == a.z.end())
            throw InputError("assignment is missing " + zname(t, l));
        return it->second;
    };
    for (const auto& [key, unused] : a.y) {
        (void)unused;
        if (key.first < 0 || key.first >= e.n || key.second < 1 ||
            key.second > g.interior_count(key.first))
            throw InputError("assignment names unknown variable " +
                             yname(key.first, key.second));
    }
    for (const auto& [key, unused] : a.z) {
        (void)unused;
        if (key.first < 0 || key.first >= static_cast<int>(e.trees.size()) || key.second < 0 ||
            key.second >= static_cast<int>(e.trees[key.first].nodes.size()) ||
            !e.trees[key.first].nodes[key.second].is_leaf())
            throw InputError("assignment names unknown variable " +
                             zname(key.first, key.second));
    }

    for (int i = 0; i < e.n; ++i) {
        if (a.x[i] < e.lower[i] - tol || a.x[i] > e.upper[i] + tol)
            flag("bounds x_" + std::to_string(i),
                 std::max(e.lower[i] - a.x[i], a.x[i] - e.upper[i]));
    }
    for (std::size_t t = 0; t < e.trees.size(); ++t) {
        double sum = 0.0;
        for (std::size_t l = 0; l < e.trees[t].nodes.size(); ++l)
            if (e.trees[t].nodes[l].is_leaf())
                sum += zval(static_cast<int>(t), static_cast<int>(l));
        if (std::abs(sum - 1.0) > tol) flag("leaf_" + std::to_string(t), std::abs(sum - 1.0));
    }
    for (std::size_t t = 0; t < e.trees.size(); ++t) {
        const Tree& tree = e.trees[t];
        for (std::size_t s = 0; s < tree.nodes.size(); ++s) {
            const TreeNode& nd = tree.nodes[s];
            if (nd.is_leaf()) continue;
            int j = grid_index_of(g, nd.var, nd.value);
            std::vector<int> leaves;
            collect_leaves(tree, nd.left, leaves);
            double lsum = 0.0;
            for (int l : leaves) lsum += zval(static_cast<int>(t), l);
            double y = yval(nd.var, j);
            if (lsum - y > tol)
                flag("left_" + std::to_string(t) + "_" + std::to_string(s), lsum - y);
            leaves.clear();
            collect_leaves(tree, nd.right, leaves);
            double rsum = 0.0;
            for (int l : leaves) rsum += zval(static_cast<int>(t), l);
            if (rsum + y - 1.0 > tol)
                flag("right_" + std::to_string(t) + "_" + std::to_string(s), rsum + y - 1.0);
        }
    }
    for (int i = 0; i < e.n; ++i)
        for (int j = 1; j + 1 <= g.interior_count(i); ++j)
            if (yval(i, j) - yval(i, j + 1) > tol)
                flag("order_" + std::to_string(i) + "_" + std::to_string(j),
                     yval(i, j) - yval(i, j + 1));
    for (int i = 0; i < e.n; ++i) {
        const int m = g.interior_count(i);
        double lo = a.x[i], up = a.x[i];
        for (int j = 1; j <= m; ++j) {
            lo += (g.value_at(i, j) - g.value_at(i, j - 1)) * yval(i, j);
            up += (g.value_at(i, j + 1) - g.value_at(i, j)) * yval(i, j);
        }
        if (g.value_at(i, m) - lo > tol) flag("linklo_" + std::to_string(i), g.value_at(i, m) - lo);
        if (up - g.value_at(i, m + 1) > tol)
            flag("linkup_" + std::to_string(i), up - g.value_at(i, m + 1));
    }
    for (const auto& [key, zv] : a.z)
        if (zv < -tol)
            flag("nonneg " + zname(key.first, key.second), -zv);

    // Native objective: penalty at x plus the tree value of the y-implied cell.
    NodeDomain cell;
    cell.lo.resize(e.n);
    cell.hi.resize(e.n);
    for (int i = 0; i < e.n; ++i) {
        int m = g.interior_count(i);
        int jstar = m + 1;
        for (int j = 1; j <= m; ++j)
            if (yval(i, j) >= 0.5) {
                jstar = j;
                break;
            }
        cell.lo[i] = jstar - 1;
        cell.hi[i] = jstar;
    }
    v.native_objective = penalty_eval(model, a.x) + ensemble_value_on_cell(e, cell, g);
    v.assignment_objective =
        a.has_objective ? a.objective : milp_objective(e, g, model, a);
    v.discrepancy = std::abs(v.assignment_objective - v.native_objective);
    return v;
}

MilpAssignment build_certificate(const TreeEnsemble& e, const BreakpointGrid& g,
                                 std::span<const double> x) {
    if (static_cast<int>(x.size()) != e.n)
        throw InputError("certificate point has wrong dimension");
    NodeDomain cell;
    cell.lo.resize(e.n);
    cell.hi.resize(e.n);
    for (int i = 0; i < e.n; ++i) {
        const auto& row = g.rows[i];
        if (x[i] < row.front() || x[i] > row.back())
            throw InputError("certificate point lies outside the box");
        // Cell index c: v_c <= x < v_{c+1}; x at the top lands in the last cell.
        int c = static_cast<int>(std::upper_bound(row.begin(), row.end(), x[i]) -
                                 row.begin()) - 1;
        c = std::min(c, static_cast<int>(row.size()) - 2);
        cell.lo[i] = c;
        cell.hi[i] = c + 1;
    }
    MilpAssignment a;
    a.x = domain_representative(cell, g);
    for (int i = 0; i < e.n; ++i)
        for (int j = 1; j <= g.interior_count(i); ++j)
            a.y[{i, j}] = a.x[i] < g.value_at(i, j) ? 1.0 : 0.0;
    for (std::size_t t = 0; t < e.trees.size(); ++t) {
        int hit = trace_leaf(e.trees[t], a.x);
        for (std::size_t l = 0; l < e.trees[t].nodes.size(); ++l)
            if (e.trees[t].nodes[l].is_leaf())
                a.z[{static_cast<int>(t), static_cast<int>(l)}] =
                    static_cast<int>(l) == hit ? 1.0 : 0.0;
    }
    return a;
}

MilpAssignment parse_solution_csv(const std::string& text, int n) {
    MilpAssignment a;
    a.x.assign(n, 0.0);
    std::vector<char> have_x(n, 0);
    std::istringstream is(text);
    std::string line;
    bool first = true;
    auto parse_int = [](const std::string& s, int& out) {
        try {
            std::size_t pos = 0;
            out = std::stoi(s, &pos);
            return pos == s.size();
        } catch (...) {
            return false;
        }
    };
    while (std::getline(is, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (first && line == "name,value") {
            first = false;
            continue;
        }
        first = false;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw InputError("solution row is not name,value: " + line);
        std::string name = line.substr(0, comma);
        std::string valstr = line.substr(comma + 1);
        double val;
        try {
            std::size_t pos = 0;
            val = std::stod(valstr, &pos);
            if (pos != valstr.size()) throw std::invalid_argument("");
        } catch (...) {
            throw InputError("bad numeric value in solution row: " + line);
        }
        if (name == "objective") {
            a.has_objective = true;
            a.objective = val;
            continue;
        }
        std::vector<std::string> parts;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= name.size(); ++i)
            if (i == name.size() || name[i] == '_') {
                parts.push_back(name.substr(start, i - start));
                start = i + 1;
            }
        int i1 = 0, i2 = 0;
        if (parts.size() == 2 && parts[0] == "x" && parse_int(parts[1], i1)) {
            if (i1 < 0 || i1 >= n) throw InputError("solution names unknown variable " + name);
            a.x[i1] = val;
            have_x[i1] = 1;
        } else if (parts.size() == 3 && parts[0] == "y" && parse_int(parts[1], i1) &&
                   parse_int(parts[2], i2)) {
            a.y[{i1, i2}] = val;
        } else if (parts.size() == 3 && parts[0] == "z" && parse_int(parts[1], i1) &&
                   parse_int(parts[2], i2)) {
            a.z[{i1, i2}] = val;
        } else {
            throw InputError("solution names unknown variable " + name);
        }
    }
    for (int i = 0; i < n; ++i)
        if (!have_x[i]) throw InputError("solution is missing x_" + std::to_string(i));
    return a;
}

} // namespace gbtopt
