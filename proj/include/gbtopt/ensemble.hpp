/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbtopt/domain.hpp"
#include "gbtopt/errors.hpp"

namespace gbtopt {

/** Tree node in a flat array; a node is a leaf iff left < 0. */
struct TreeNode {
    int var = -1;            // split variable (unused for leaves)
    double value = 0.0;      // split threshold, or leaf contribution
    std::int32_t left = -1;  // child for x[var] < value
    std::int32_t right = -1; // child for x[var] >= value

    bool is_leaf() const { return left < 0; }
};

/** Binary regression tree; node 0 is the root. */
struct Tree {
    std::vector<TreeNode> nodes;
};

/** Additive tree model over a finite box. */
struct TreeEnsemble {
    int n = 0; // variable count
    std::vector<double> lower, upper;
    std::vector<Tree> trees;
};

/**
 * Per-variable sorted distinct split thresholds with the box bounds as
 * sentinels: rows[i] = { lower[i], v_1 < ... < v_m, upper[i] }. Cells are the
 * half-open products [v_j, v_{j+1}), closed at the global upper bound.
 */
struct BreakpointGrid {
    std::vector<std::vector<double>> rows;

    int interior_count(int i) const { return static_cast<int>(rows[i].size()) - 2; }
    double value_at(int i, int j) const { return rows[i][j]; }
    int last_index(int i) const { return static_cast<int>(rows[i].size()) - 1; }
};

struct EnsembleStats {
    int tree_count = 0;
    long leaf_count = 0;
    int max_depth = 0;
    long binary_var_count = 0;       // total interior breakpoints
    double combination_log2 = 0.0;   // log2 of the leaf-combination cap
    long pair_checks = 0;            // |T|(|T|-1)/2
};

/**
 * Parse and validate a tree-model dump (JSON). Splits at or outside the box
 * are collapsed at ingestion, unreachable nodes dropped. Throws InputError on
 * malformed documents, dangling child ids, shared subtrees, cycles,
 * out-of-range variables, non-finite values, or an inverted/empty box.
 */
TreeEnsemble load_ensemble(const std::string& text);

/** Serialize in the same dump format load_ensemble reads. */
std::string dump_ensemble(const TreeEnsemble& e);

/** Single-tree contribution at x; ties x == threshold go right. */
double evaluate_tree(const Tree& t, std::span<const double> x);

/** Sum of tree contributions at x; x must have e.n entries. */
double evaluate_ensemble(const TreeEnsemble& e, std::span<const double> x);

/** Leaf reached by x in t (node index). */
int trace_leaf(const Tree& t, std::span<const double> x);

/** Sorted distinct thresholds per variable, with box sentinels attached. */
BreakpointGrid extract_breakpoints(const TreeEnsemble& e);

EnsembleStats ensemble_stats(const TreeEnsemble& e);

/** Index of value in rows[i]; throws InputError when absent. */
int grid_index_of(const BreakpointGrid& g, int i, double value);

/** Full-box region: [0, last_index(i)) per variable. */
NodeDomain root_domain(const BreakpointGrid& g);

/** Closed-box hull [value_at(lo), value_at(hi)] of a region. */
void domain_box(const NodeDomain& d, const BreakpointGrid& g,
                std::vector<double>& lower, std::vector<double>& upper);

/** Interval midpoints; always evaluates inside the region. */
std::vector<double> domain_representative(const NodeDomain& d, const BreakpointGrid& g);

/**
 * Copy of t with every split decided by the region collapsed to the surviving
 * child; node ids are renumbered, evaluation on the region is unchanged.
 */
Tree reduce_tree(const Tree& t, const NodeDomain& d, const BreakpointGrid& g);

/** Leaves of t consistent with the region (domain AND path constraints). */
long count_reachable_leaves(const Tree& t, const NodeDomain& d, const BreakpointGrid& g);

/**
 * Exact tree sum on a single cell (every split decided). Throws InputError if
 * some split is undecided, i.e. d is not a cell on the variables t uses.
 */
double tree_value_on_cell(const Tree& t, const NodeDomain& d, const BreakpointGrid& g);
double ensemble_value_on_cell(const TreeEnsemble& e, const NodeDomain& d, const BreakpointGrid& g);

} // namespace gbtopt
