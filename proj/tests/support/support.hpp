/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gbtopt/bounding.hpp"
#include "gbtopt/ensemble.hpp"
#include "gbtopt/io.hpp"
#include "gbtopt/linalg.hpp"
#include "gbtopt/penalty.hpp"

namespace gbtopt::test {

inline std::string data_path(const std::string& name)
{
    return std::string(GBTOPT_DATA_DIR) + "/" + name;
}

// ---------------------------------------------------------------------------
// Random instance generator. Split values come from a small per-variable
// palette so thresholds repeat across trees and grids stay small.
// ---------------------------------------------------------------------------

struct GenOptions {
    int n = 2;
    int trees = 4;
    int max_depth = 3;
    int palette = 4;          // candidate thresholds per variable
    double box_lo = 0.0;
    double box_hi = 10.0;
    double leaf_lo = -10.0;
    double leaf_hi = 10.0;
    double split_prob = 0.85; // chance an expandable node splits
};

class InstanceGen {
public:
    explicit InstanceGen(std::uint64_t seed) : rng_(seed) {}

    std::mt19937_64& rng() { return rng_; }

    double uniform(double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }

    int uniform_int(int lo, int hi) // inclusive
    {
        return std::uniform_int_distribution<int>(lo, hi)(rng_);
    }

    TreeEnsemble ensemble(const GenOptions& o)
    {
        TreeEnsemble e;
        e.n = o.n;
        e.lower.assign(o.n, o.box_lo);
        e.upper.assign(o.n, o.box_hi);
        palette_.assign(o.n, {});
        for (int i = 0; i < o.n; ++i) {
            for (int j = 0; j < o.palette; ++j)
                palette_[i].push_back(uniform(o.box_lo + 0.05 * (o.box_hi - o.box_lo),
                                              o.box_hi - 0.05 * (o.box_hi - o.box_lo)));
            std::sort(palette_[i].begin(), palette_[i].end());
            palette_[i].erase(std::unique(palette_[i].begin(), palette_[i].end()),
                              palette_[i].end());
        }
        for (int t = 0; t < o.trees; ++t) {
            Tree tr;
            std::vector<double> lo(e.lower), hi(e.upper);
            build_node(tr, o, lo, hi, 0);
            e.trees.push_back(std::move(tr));
        }
        return e;
    }

    /** In-box uniform point. */
    std::vector<double> point(const TreeEnsemble& e)
    {
        std::vector<double> x(e.n);
        for (int i = 0; i < e.n; ++i)
            x[i] = uniform(e.lower[i], e.upper[i]);
        return x;
    }

    /** Random nonempty sub-domain of the grid. */
    NodeDomain subdomain(const BreakpointGrid& g)
    {
        NodeDomain d;
        const int n = static_cast<int>(g.rows.size());
        d.lo.resize(n);
        d.hi.resize(n);
        for (int i = 0; i < n; ++i) {
            const int last = g.last_index(i);
            const int a = uniform_int(0, last - 1);
            const int b = uniform_int(a + 1, last);
            d.lo[i] = a;
            d.hi[i] = b;
        }
        return d;
    }

    /** Random partition of the tree ids into nonempty blocks. */
    Partition partition(int tree_count)
    {
        std::vector<int> ids(tree_count);
        for (int t = 0; t < tree_count; ++t)
            ids[t] = t;
        std::shuffle(ids.begin(), ids.end(), rng_);
        Partition p;
        int at = 0, id = 0;
        while (at < tree_count) {
            const int take = std::min(tree_count - at, uniform_int(1, 3));
            Block b;
            b.id = id++;
            b.trees.assign(ids.begin() + at, ids.begin() + at + take);
            std::sort(b.trees.begin(), b.trees.end());
            at += take;
            p.blocks.push_back(std::move(b));
        }
        return p;
    }

    /** Random PCA penalty fit from synthetic correlated data. */
    PenaltyModel penalty(int n, double lambda)
    {
        const int rows = 12 + uniform_int(0, 8);
        Matrix data(rows, n);
        std::vector<double> base(rows);
        for (int r = 0; r < rows; ++r)
            base[r] = uniform(0.0, 10.0);
        for (int c = 0; c < n; ++c) {
            const double w = uniform(0.5, 2.0), off = uniform(-2.0, 2.0);
            for (int r = 0; r < rows; ++r)
                data.at(r, c) = w * base[r] + off + uniform(-1.0, 1.0);
        }
        const int k = uniform_int(1, std::max(1, n - 1));
        PenaltyModel m = fit_pca(data, k);
        m.lambda = lambda;
        return m;
    }

private:
    void build_node(Tree& tr, const GenOptions& o, std::vector<double>& lo,
                    std::vector<double>& hi, int depth)
    {
        const int self = static_cast<int>(tr.nodes.size());
        tr.nodes.emplace_back();
        std::vector<std::pair<int, double>> choices; // (var, value) usable here
        for (int i = 0; i < o.n; ++i)
            for (double v : palette_[i])
                if (lo[i] < v && v < hi[i])
                    choices.emplace_back(i, v);
        const bool split = depth < o.max_depth && !choices.empty() &&
                           uniform(0.0, 1.0) < o.split_prob;
        if (!split) {
            tr.nodes[self].var = -1;
            tr.nodes[self].value = uniform(o.leaf_lo, o.leaf_hi);
            tr.nodes[self].left = tr.nodes[self].right = -1;
            return;
        }
        const auto [var, value] = choices[uniform_int(0, static_cast<int>(choices.size()) - 1)];
        const int left = static_cast<int>(tr.nodes.size());
        const double saved_hi = hi[var];
        hi[var] = value;
        build_node(tr, o, lo, hi, depth + 1);
        hi[var] = saved_hi;
        const int right = static_cast<int>(tr.nodes.size());
        const double saved_lo = lo[var];
        lo[var] = value;
        build_node(tr, o, lo, hi, depth + 1);
        lo[var] = saved_lo;
        tr.nodes[self].var = var;
        tr.nodes[self].value = value;
        tr.nodes[self].left = left;
        tr.nodes[self].right = right;
    }

    std::mt19937_64 rng_;
    std::vector<std::vector<double>> palette_;
};

// ---------------------------------------------------------------------------
// Cell-enumeration oracle: exact tree value per cell plus the convex minimum
// over the cell closure, minimized over every grid cell.
// ---------------------------------------------------------------------------

struct OracleResult {
    double value = 0.0;
    NodeDomain cell;
    std::vector<double> minimizer; // convex minimizer on the best closure
};

inline OracleResult cell_enumeration_min(const TreeEnsemble& e, const BreakpointGrid& g,
                                         const PenaltyModel& model, const NodeDomain& region)
{
    OracleResult best;
    best.value = std::numeric_limits<double>::infinity();
    NodeDomain cell;
    cell.lo.assign(region.lo.begin(), region.lo.end());
    cell.hi.assign(e.n, 0);
    for (int i = 0; i < e.n; ++i)
        cell.hi[i] = cell.lo[i] + 1;
    std::vector<double> lo(e.n), hi(e.n);
    for (;;) {
        double tree_value = 0.0;
        for (const Tree& t : e.trees)
            tree_value += tree_value_on_cell(t, cell, g);
        domain_box(cell, g, lo, hi);
        const BoxMin cm = min_convex_over_box(model, lo, hi);
        const double total = cm.value + tree_value;
        if (total < best.value) {
            best.value = total;
            best.cell = cell;
            best.minimizer = cm.x;
        }
        int i = e.n - 1;
        while (i >= 0 && cell.hi[i] == region.hi[i]) {
            cell.lo[i] = region.lo[i];
            cell.hi[i] = cell.lo[i] + 1;
            --i;
        }
        if (i < 0)
            break;
        ++cell.lo[i];
        ++cell.hi[i];
    }
    return best;
}

inline OracleResult cell_enumeration_min(const TreeEnsemble& e, const BreakpointGrid& g,
                                         const PenaltyModel& model)
{
    return cell_enumeration_min(e, g, model, root_domain(g));
}

/** Pure-tree variant (no penalty term). */
inline OracleResult cell_enumeration_min(const TreeEnsemble& e, const BreakpointGrid& g)
{
    return cell_enumeration_min(e, g, zero_penalty(e.n));
}

// ---------------------------------------------------------------------------
// Numerical cross-checks.
// ---------------------------------------------------------------------------

/** Leading eigenpairs of a symmetric matrix by power iteration + deflation. */
inline SymmetricEigen power_iteration_eigs(Matrix s, int k, int iters = 5000)
{
    const int n = static_cast<int>(s.rows);
    SymmetricEigen out;
    out.vectors = Matrix(n, k);
    std::mt19937_64 rng(12345);
    for (int c = 0; c < k; ++c) {
        std::vector<double> v(n);
        for (double& vi : v)
            vi = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
        double lam = 0.0;
        for (int it = 0; it < iters; ++it) {
            std::vector<double> w(n, 0.0);
            for (int r = 0; r < n; ++r)
                for (int cc = 0; cc < n; ++cc)
                    w[r] += s.at(r, cc) * v[cc];
            double norm = 0.0;
            for (double wi : w)
                norm += wi * wi;
            norm = std::sqrt(norm);
            if (norm == 0.0)
                break;
            for (int r = 0; r < n; ++r)
                v[r] = w[r] / norm;
            lam = norm;
        }
        // Rayleigh quotient for a signed eigenvalue.
        std::vector<double> w(n, 0.0);
        for (int r = 0; r < n; ++r)
            for (int cc = 0; cc < n; ++cc)
                w[r] += s.at(r, cc) * v[cc];
        lam = 0.0;
        for (int r = 0; r < n; ++r)
            lam += v[r] * w[r];
        out.values.push_back(lam);
        for (int r = 0; r < n; ++r)
            out.vectors.at(r, c) = v[r];
        for (int r = 0; r < n; ++r)
            for (int cc = 0; cc < n; ++cc)
                s.at(r, cc) -= lam * v[r] * v[cc];
    }
    return out;
}

template <typename F>
std::vector<double> central_diff_grad(const F& f, std::vector<double> x, double h = 1e-6)
{
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = x[i];
        x[i] = saved + h;
        const double fp = f(x);
        x[i] = saved - h;
        const double fm = f(x);
        x[i] = saved;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// ---------------------------------------------------------------------------
// LP-format grammar check, covering the productions the exporter emits.
// ---------------------------------------------------------------------------

struct LpCheck {
    bool ok = true;
    std::string error;
};

inline bool lp_is_name(const std::string& s)
{
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

inline bool lp_is_number(const std::string& s)
{
    if (s.empty())
        return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

inline LpCheck lp_grammar_check(const std::string& text)
{
    auto fail = [](const std::string& why) {
        LpCheck c;
        c.ok = false;
        c.error = why;
        return c;
    };

    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty())
        lines.push_back(cur);

    enum Section { None, Objective, Rows, Bounds, Binary, Done };
    Section sec = None;
    bool saw_min = false, saw_rows = false, saw_end = false;

    auto tokens_of = [](const std::string& line) {
        std::vector<std::string> toks;
        std::string t;
        for (char c : line) {
            if (c == ' ' || c == '\t') {
                if (!t.empty()) {
                    toks.push_back(t);
                    t.clear();
                }
            } else {
                t.push_back(c);
            }
        }
        if (!t.empty())
            toks.push_back(t);
        return toks;
    };

    // Linear expression: [sign] [coef] name { sign [coef] name }.
    // When quad=true, one bracketed block "[ ... ] / 2" with x^2 and x * y
    // terms may appear.
    auto check_expr = [&](const std::vector<std::string>& toks, size_t from, size_t to,
                          bool quad, std::string& why) {
        size_t i = from;
        bool any = false;
        bool expect_term = true; // at expression start a sign is optional
        while (i < to) {
            if (toks[i] == "+" || toks[i] == "-") {
                ++i;
                expect_term = true;
                continue;
            }
            if (quad && toks[i] == "[") {
                ++i;
                bool qany = false;
                while (i < to && toks[i] != "]") {
                    if (toks[i] == "+" || toks[i] == "-") {
                        ++i;
                        continue;
                    }
                    if (lp_is_number(toks[i]))
                        ++i;
                    if (i >= to) {
                        why = "quadratic term truncated";
                        return false;
                    }
                    std::string v = toks[i];
                    if (v.size() > 2 && v.substr(v.size() - 2) == "^2") {
                        // Squared term written without spaces: x_0^2.
                        if (!lp_is_name(v.substr(0, v.size() - 2))) {
                            why = "bad squared variable: " + v;
                            return false;
                        }
                        ++i;
                    } else {
                        if (!lp_is_name(v)) {
                            why = "bad variable in quadratic: " + v;
                            return false;
                        }
                        ++i;
                        if (i + 1 >= to || !(toks[i] == "*" || toks[i] == "^")) {
                            why = "expected * or ^ after quadratic variable";
                            return false;
                        }
                        if (toks[i] == "^") {
                            // Spaced squared term: x_0 ^ 2.
                            ++i;
                            if (toks[i] != "2") {
                                why = "only squares allowed in quadratic block";
                                return false;
                            }
                            ++i;
                        } else {
                            ++i;
                            if (!lp_is_name(toks[i])) {
                                why = "bad second variable in bilinear term";
                                return false;
                            }
                            ++i;
                        }
                    }
                    qany = true;
                }
                if (i >= to || toks[i] != "]") {
                    why = "unterminated quadratic block";
                    return false;
                }
                ++i;
                if (i + 1 >= to || toks[i] != "/" || toks[i + 1] != "2") {
                    why = "quadratic block must end with / 2";
                    return false;
                }
                i += 2;
                if (!qany) {
                    why = "empty quadratic block";
                    return false;
                }
                any = true;
                expect_term = false;
                continue;
            }
            if (lp_is_number(toks[i])) {
                ++i;
                if (i < to && lp_is_name(toks[i]))
                    ++i; // coefficient name
                any = true;
                expect_term = false;
                continue;
            }
            if (lp_is_name(toks[i])) {
                ++i;
                any = true;
                expect_term = false;
                continue;
            }
            why = "unexpected token '" + toks[i] + "'";
            return false;
        }
        if (!any || expect_term) {
            why = "dangling operator or empty expression";
            return false;
        }
        return true;
    };

    for (const std::string& raw : lines) {
        std::string line = raw;
        if (!line.empty() && line[0] == '\\')
            continue; // comment
        std::vector<std::string> toks = tokens_of(line);
        if (toks.empty())
            continue;
        if (saw_end)
            return fail("content after End");
        if (toks.size() == 1 && toks[0] == "Minimize") {
            if (sec != None)
                return fail("Minimize out of order");
            sec = Objective;
            saw_min = true;
            continue;
        }
        if (toks.size() == 2 && toks[0] == "Subject" && toks[1] == "To") {
            if (sec != Objective)
                return fail("Subject To before Minimize");
            sec = Rows;
            saw_rows = true;
            continue;
        }
        if (toks.size() == 1 && toks[0] == "Bounds") {
            if (sec != Rows)
                return fail("Bounds out of order");
            sec = Bounds;
            continue;
        }
        if (toks.size() == 1 && toks[0] == "Binary") {
            if (sec != Bounds && sec != Rows)
                return fail("Binary out of order");
            sec = Binary;
            continue;
        }
        if (toks.size() == 1 && toks[0] == "End") {
            saw_end = true;
            sec = Done;
            continue;
        }
        std::string why;
        switch (sec) {
        case Objective: {
            if (toks[0].back() != ':')
                return fail("objective must be named");
            if (!check_expr(toks, 1, toks.size(), true, why))
                return fail("objective: " + why);
            break;
        }
        case Rows: {
            if (toks[0].back() != ':' ||
                !lp_is_name(toks[0].substr(0, toks[0].size() - 1)))
                return fail("row must start with 'name:': " + toks[0]);
            // find relational operator
            size_t rel = 0;
            for (size_t i = 1; i < toks.size(); ++i)
                if (toks[i] == "<=" || toks[i] == ">=" || toks[i] == "=")
                    rel = i;
            if (rel == 0 || rel + 2 != toks.size())
                return fail("row needs 'expr op rhs': " + raw);
            if (!lp_is_number(toks[rel + 1]))
                return fail("row rhs not a number: " + raw);
            if (!check_expr(toks, 1, rel, false, why))
                return fail("row '" + toks[0] + "' " + why);
            break;
        }
        case Bounds: {
            // form: lo <= name <= hi
            if (toks.size() != 5 || toks[1] != "<=" || toks[3] != "<=" ||
                !lp_is_number(toks[0]) || !lp_is_name(toks[2]) || !lp_is_number(toks[4]))
                return fail("bad bounds line: " + raw);
            break;
        }
        case Binary: {
            for (const std::string& t : toks)
                if (!lp_is_name(t))
                    return fail("bad binary name: " + t);
            break;
        }
        case None:
            return fail("content before Minimize");
        case Done:
            break;
        }
    }
    if (!saw_min || !saw_rows || !saw_end)
        return fail("missing Minimize/Subject To/End");
    return {};
}

} // namespace gbtopt::test
