/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>

#include "gbtopt/ensemble.hpp"
#include "gbtopt/penalty.hpp"

namespace gbtopt {

/**
 * Values for the exported model's variables: x_i (continuous), y_i_j (one per
 * interior breakpoint, j in 1..m_i), z_t_l (one per tree leaf, l = leaf node
 * id). An `objective` row, when present, is the claimed objective value.
 */
struct MilpAssignment {
    std::vector<double> x;
    std::map<std::pair<int, int>, double> y; // (var, breakpoint index) -> value
    std::map<std::pair<int, int>, double> z; // (tree, leaf node id) -> value
    bool has_objective = false;
    double objective = 0.0;
};

/**
 * LP-format text of the equivalent mixed-integer model: leaf-sum rows (one
 * per tree), split activation rows (two per split), breakpoint ordering rows,
 * two linking rows per variable, x bounds, binary y. The quadratic objective
 * is written as linear + constant + [ doubled quadratic ] / 2. Deterministic
 * byte-for-byte for identical inputs.
 */
std::string export_milp(const TreeEnsemble& e, const BreakpointGrid& g, const PenaltyModel& model);

/** The exported objective evaluated at an assignment. */
double milp_objective(const TreeEnsemble& e, const BreakpointGrid& g, const PenaltyModel& model,
                      const MilpAssignment& a);

struct CheckVerdict {
    bool consistent = true;              // all rows satisfied within tolerance
    std::vector<std::string> violations; // human-readable, one per violated row
    double assignment_objective = 0.0;   // claimed, or recomputed from the assignment
    double native_objective = 0.0;       // penalty at x + tree value of the cell implied by y
    double discrepancy = 0.0;
};

/**
 * Check every exported row at the assignment within tol; boundary x values
 * satisfy either side within tol. Also recomputes the objective natively
 * (penalty at x, trees on the cell the y values select) and reports the
 * discrepancy against the assignment's objective.
 */
CheckVerdict check_solution(const TreeEnsemble& e, const BreakpointGrid& g,
                            const PenaltyModel& model, const MilpAssignment& a,
                            double tol = 1e-6);

/**
 * Assignment certifying the cell containing x: x snapped to the cell
 * midpoint, y by thresholding, z by tree traversal. Satisfies every exported
 * row, and its objective equals the native objective at the midpoint.
 */
MilpAssignment build_certificate(const TreeEnsemble& e, const BreakpointGrid& g,
                                 std::span<const double> x);

/** Parse `name,value` rows (optional header) into an assignment. */
MilpAssignment parse_solution_csv(const std::string& text, int n);

} // namespace gbtopt
