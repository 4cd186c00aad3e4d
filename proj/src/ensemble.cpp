/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "gbtopt/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <json.hpp>

namespace gbtopt {

using nlohmann::json;

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw InputError(what);
}

/** Structural validation of one raw tree: rooted at 0, every non-root has exactly one parent. */
void validate_tree_structure(const std::vector<TreeNode>& nodes, int n, int tree_idx) {
    const std::string where = "tree " + std::to_string(tree_idx) + ": ";
    require(!nodes.empty(), where + "empty node list");
    const int count = static_cast<int>(nodes.size());
    std::vector<int> refs(nodes.size(), 0);
    for (int id = 0; id < count; ++id) {
        const TreeNode& nd = nodes[id];
        if (nd.is_leaf()) {
            require(std::isfinite(nd.value), where + "non-finite leaf value at node " + std::to_string(id));
            continue;
        }
        require(nd.var >= 0 && nd.var < n,
                where + "split variable out of range at node " + std::to_string(id));
        require(std::isfinite(nd.value), where + "non-finite split value at node " + std::to_string(id));
        for (std::int32_t child : {nd.left, nd.right}) {
            require(child >= 0 && child < count,
                    where + "dangling child id at node " + std::to_string(id));
            require(child != 0, where + "root referenced as a child");
            ++refs[child];
        }
    }
    for (int id = 1; id < count; ++id) {
        require(refs[id] != 0, where + "unreachable node " + std::to_string(id));
        require(refs[id] == 1, where + "node " + std::to_string(id) + " shared by multiple parents");
    }
    // Reference counts admit disjoint cycles; a walk from the root rules them out.
    std::vector<char> seen(nodes.size(), 0);
    std::vector<int> stack{0};
    int visited = 0;
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        if (seen[id]) continue;
        seen[id] = 1;
        ++visited;
        if (!nodes[id].is_leaf()) {
            stack.push_back(nodes[id].left);
            stack.push_back(nodes[id].right);
        }
    }
    require(visited == count, where + "cycle or disconnected nodes");
}

/**
 * Collapse splits decided by the box: a threshold at or below the lower bound
 * sends every box point right (ties go right), one at or above the upper
 * bound sends every point left. Rebuilds the surviving nodes in preorder.
 */
Tree simplify_against_box(const std::vector<TreeNode>& nodes,
                          const std::vector<double>& lower,
                          const std::vector<double>& upper) {
    Tree out;
    // Surviving nodes are emitted in preorder, so the (possibly collapsed)
    // root lands at index 0 and dropped subtrees are never copied.
    std::function<std::int32_t(int)> emit = [&](int id) -> std::int32_t {
        const TreeNode& nd = nodes[id];
        if (!nd.is_leaf()) {
            if (nd.value <= lower[nd.var]) return emit(nd.right);
            if (nd.value >= upper[nd.var]) return emit(nd.left);
        }
        std::int32_t self = static_cast<std::int32_t>(out.nodes.size());
        out.nodes.push_back(nd);
        if (!nd.is_leaf()) {
            std::int32_t l = emit(nd.left);
            std::int32_t r = emit(nd.right);
            out.nodes[self].left = l;
            out.nodes[self].right = r;
        }
        return self;
    };
    emit(0);
    return out;
}

int tree_depth(const Tree& t, int id = 0) {
    const TreeNode& nd = t.nodes[id];
    if (nd.is_leaf()) return 0;
    return 1 + std::max(tree_depth(t, nd.left), tree_depth(t, nd.right));
}

long tree_leaves(const Tree& t) {
    long c = 0;
    for (const TreeNode& nd : t.nodes) c += nd.is_leaf() ? 1 : 0;
    return c;
}

} // namespace

TreeEnsemble load_ensemble(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed model document: ") + e.what());
    }
    require(doc.is_object(), "model document must be a JSON object");
    require(doc.contains("n") && doc["n"].is_number_integer(), "missing integer field 'n'");
    TreeEnsemble e;
    e.n = doc["n"].get<int>();
    require(e.n >= 1, "'n' must be at least 1");
    require(doc.contains("lower") && doc["lower"].is_array() &&
                static_cast<int>(doc["lower"].size()) == e.n,
            "'lower' must be an array of n numbers");
    require(doc.contains("upper") && doc["upper"].is_array() &&
                static_cast<int>(doc["upper"].size()) == e.n,
            "'upper' must be an array of n numbers");
    e.lower.resize(e.n);
    e.upper.resize(e.n);
    for (int i = 0; i < e.n; ++i) {
        require(doc["lower"][i].is_number() && doc["upper"][i].is_number(),
                "box bounds must be numbers");
        e.lower[i] = doc["lower"][i].get<double>();
        e.upper[i] = doc["upper"][i].get<double>();
        require(std::isfinite(e.lower[i]) && std::isfinite(e.upper[i]),
                "box bounds must be finite");
        require(e.lower[i] < e.upper[i],
                "empty box: lower[" + std::to_string(i) + "] >= upper[" + std::to_string(i) + "]");
    }
    require(doc.contains("trees") && doc["trees"].is_array(), "'trees' must be an array");
    int tree_idx = 0;
    for (const json& jt : doc["trees"]) {
        const std::string where = "tree " + std::to_string(tree_idx) + ": ";
        require(jt.is_array(), where + "must be an array of nodes");
        std::vector<TreeNode> nodes;
        nodes.reserve(jt.size());
        for (const json& jn : jt) {
            require(jn.is_object(), where + "node must be an object");
            TreeNode nd;
            if (jn.contains("leaf")) {
                require(!jn.contains("split"), where + "node has both 'leaf' and 'split'");
                require(jn["leaf"].is_number(), where + "'leaf' must be a number");
                nd.value = jn["leaf"].get<double>();
            } else if (jn.contains("split")) {
                const json& js = jn["split"];
                require(js.is_object() && js.contains("var") && js.contains("value") &&
                            js.contains("left") && js.contains("right"),
                        where + "'split' needs var/value/left/right");
                require(js["var"].is_number_integer() && js["value"].is_number() &&
                            js["left"].is_number_integer() && js["right"].is_number_integer(),
                        where + "malformed 'split' fields");
                nd.var = js["var"].get<int>();
                nd.value = js["value"].get<double>();
                nd.left = js["left"].get<std::int32_t>();
                nd.right = js["right"].get<std::int32_t>();
                require(nd.left >= 0 && nd.right >= 0, where + "negative child id");
            } else {
                throw InputError(where + "node is neither 'leaf' nor 'split'");
            }
            nodes.push_back(nd);
        }
        validate_tree_structure(nodes, e.n, tree_idx);
        e.trees.push_back(simplify_against_box(nodes, e.lower, e.upper));
        ++tree_idx;
    }
    return e;
}

std::string dump_ensemble(const TreeEnsemble& e) {
    json doc;
    doc["n"] = e.n;
    doc["lower"] = e.lower;
    doc["upper"] = e.upper;
    json jtrees = json::array();
    for (const Tree& t : e.trees) {
        json jt = json::array();
        for (const TreeNode& nd : t.nodes) {
            if (nd.is_leaf()) {
                jt.push_back(json{{"leaf", nd.value}});
            } else {
                jt.push_back(json{{"split", {{"var", nd.var},
                                             {"value", nd.value},
                                             {"left", nd.left},
                                             {"right", nd.right}}}});
            }
        }
        jtrees.push_back(std::move(jt));
    }
    doc["trees"] = std::move(jtrees);
    return doc.dump(2);
}

int trace_leaf(const Tree& t, std::span<const double> x) {
    int id = 0;
    while (!t.nodes[id].is_leaf()) {
        const TreeNode& nd = t.nodes[id];
        id = (x[nd.var] < nd.value) ? nd.left : nd.right;
    }
    return id;
}

double evaluate_tree(const Tree& t, std::span<const double> x) {
    return t.nodes[trace_leaf(t, x)].value;
}

double evaluate_ensemble(const TreeEnsemble& e, std::span<const double> x) {
    if (static_cast<int>(x.size()) != e.n)
        throw InputError("evaluation point has wrong dimension");
    double s = 0.0;
    for (const Tree& t : e.trees) s += evaluate_tree(t, x);
    return s;
}

BreakpointGrid extract_breakpoints(const TreeEnsemble& e) {
    BreakpointGrid g;
    g.rows.assign(e.n, {});
    for (const Tree& t : e.trees)
        for (const TreeNode& nd : t.nodes)
            if (!nd.is_leaf()) g.rows[nd.var].push_back(nd.value);
    for (int i = 0; i < e.n; ++i) {
        auto& row = g.rows[i];
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        row.insert(row.begin(), e.lower[i]);
        row.push_back(e.upper[i]);
    }
    return g;
}

EnsembleStats ensemble_stats(const TreeEnsemble& e) {
    EnsembleStats s;
    s.tree_count = static_cast<int>(e.trees.size());
    for (const Tree& t : e.trees) {
        s.leaf_count += tree_leaves(t);
        s.max_depth = std::max(s.max_depth, tree_depth(t));
    }
    BreakpointGrid g = extract_breakpoints(e);
    for (int i = 0; i < e.n; ++i) s.binary_var_count += g.interior_count(i);
    s.combination_log2 = static_cast<double>(s.max_depth) * s.tree_count;
    s.pair_checks = static_cast<long>(s.tree_count) * (s.tree_count - 1) / 2;
    return s;
}

int grid_index_of(const BreakpointGrid& g, int i, double value) {
    const auto& row = g.rows[i];
    auto it = std::lower_bound(row.begin(), row.end(), value);
    if (it == row.end() || *it != value)
        throw InputError("value is not a breakpoint of variable " + std::to_string(i));
    return static_cast<int>(it - row.begin());
}

NodeDomain root_domain(const BreakpointGrid& g) {
    NodeDomain d;
    d.lo.assign(g.rows.size(), 0);
    d.hi.resize(g.rows.size());
    for (std::size_t i = 0; i < g.rows.size(); ++i)
        d.hi[i] = static_cast<std::int32_t>(g.rows[i].size()) - 1;
    return d;
}

void domain_box(const NodeDomain& d, const BreakpointGrid& g,
                std::vector<double>& lower, std::vector<double>& upper) {
    const std::size_t n = d.lo.size();
    lower.resize(n);
    upper.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        lower[i] = g.rows[i][d.lo[i]];
        upper[i] = g.rows[i][d.hi[i]];
    }
}

std::vector<double> domain_representative(const NodeDomain& d, const BreakpointGrid& g) {
    std::vector<double> x(d.lo.size());
    for (std::size_t i = 0; i < d.lo.size(); ++i)
        x[i] = 0.5 * (g.rows[i][d.lo[i]] + g.rows[i][d.hi[i]]);
    return x;
}

Tree reduce_tree(const Tree& t, const NodeDomain& d, const BreakpointGrid& g) {
    Tree out;
    std::function<std::int32_t(std::int32_t)> emit = [&](std::int32_t id) -> std::int32_t {
        TreeNode nd = t.nodes[id];
        while (!nd.is_leaf()) {
            int j = grid_index_of(g, nd.var, nd.value);
            if (d.hi[nd.var] <= j) {
                nd = t.nodes[nd.left];
                continue;
            }
            if (d.lo[nd.var] >= j) {
                nd = t.nodes[nd.right];
                continue;
            }
            break;
        }
        std::int32_t self = static_cast<std::int32_t>(out.nodes.size());
        out.nodes.push_back(nd);
        if (!nd.is_leaf()) {
            std::int32_t l = emit(nd.left);
            std::int32_t r = emit(nd.right);
            out.nodes[self].left = l;
            out.nodes[self].right = r;
        }
        return self;
    };
    emit(0);
    return out;
}

long count_reachable_leaves(const Tree& t, const NodeDomain& d, const BreakpointGrid& g) {
    NodeDomain cur = d;
    long count = 0;
    std::function<void(std::int32_t)> walk = [&](std::int32_t id) {
        const TreeNode& nd = t.nodes[id];
        if (nd.is_leaf()) {
            ++count;
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
    return count;
}

double tree_value_on_cell(const Tree& t, const NodeDomain& d, const BreakpointGrid& g) {
    int id = 0;
    while (!t.nodes[id].is_leaf()) {
        const TreeNode& nd = t.nodes[id];
        int j = grid_index_of(g, nd.var, nd.value);
        if (d.hi[nd.var] <= j)
            id = nd.left;
        else if (d.lo[nd.var] >= j)
            id = nd.right;
        else
            throw InputError("region does not decide split on variable " + std::to_string(nd.var));
    }
    return t.nodes[id].value;
}

double ensemble_value_on_cell(const TreeEnsemble& e, const NodeDomain& d, const BreakpointGrid& g) {
    double s = 0.0;
    for (const Tree& t : e.trees) s += tree_value_on_cell(t, d, g);
    return s;
}

} // namespace gbtopt
