/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gbtopt/bb.hpp"
#include "gbtopt/ensemble.hpp"
#include "gbtopt/errors.hpp"
#include "gbtopt/io.hpp"
#include "gbtopt/subset_solver.hpp"
#include "support/support.hpp"

using namespace gbtopt;
using test::GenOptions;
using test::InstanceGen;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double objective(const TreeEnsemble& e, const PenaltyModel& m, const std::vector<double>& x)
{
    return evaluate_ensemble(e, x) + penalty_eval(m, x);
}

void check_report_sane(const SolveReport& r, const TreeEnsemble& e, const PenaltyModel& m)
{
    if (r.has_incumbent) {
        CHECK(r.lower_bound <= r.incumbent_value + 1e-9);
        REQUIRE(r.incumbent_x.size() == static_cast<std::size_t>(e.n));
        for (int i = 0; i < e.n; ++i) {
            CHECK(r.incumbent_x[i] >= e.lower[i]);
            CHECK(r.incumbent_x[i] <= e.upper[i]);
        }
        CHECK(r.incumbent_objective ==
              doctest::Approx(objective(e, m, r.incumbent_x)).epsilon(1e-12));
    }
    double prev_lb = -kInf, prev_ub = kInf;
    for (const BoundEvent& ev : r.events) {
        CHECK(ev.lb >= prev_lb - 1e-12);
        CHECK(ev.ub <= prev_ub + 1e-12);
        prev_lb = ev.lb;
        prev_ub = ev.ub;
    }
}

} // namespace

TEST_CASE("solve: zero-tree ensemble reduces to the convex minimum")
{
    const TreeEnsemble e =
        load_ensemble(R"({"n":2,"lower":[0,0],"upper":[4,6],"trees":[]})");
    InstanceGen gen(401);
    PenaltyModel m = gen.penalty(2, 2.0);
    SolveConfig cfg;
    cfg.gap_tol = 0.0;
    const SolveReport r = solve(e, m, cfg);
    const BoxMin cm = min_convex_over_box(m, e.lower, e.upper);
    CHECK(r.status == "ok");
    REQUIRE(r.has_incumbent);
    CHECK(r.incumbent_value == doctest::Approx(cm.value).epsilon(1e-10));
    CHECK(r.gap <= 1e-9);
    check_report_sane(r, e, m);
}

TEST_CASE("solve: pure tree objective matches the subset oracle exactly")
{
    InstanceGen gen(403);
    GenOptions o;
    o.trees = 3;
    o.max_depth = 2;
    for (int trial = 0; trial < 10; ++trial) {
        o.n = 1 + trial % 3;
        const TreeEnsemble e = gen.ensemble(o);
        const BreakpointGrid g = extract_breakpoints(e);
        std::vector<int> ids(e.trees.size());
        for (std::size_t i = 0; i < ids.size(); ++i)
            ids[i] = static_cast<int>(i);
        const SubsetSolution exact = brute_force_subset(e, ids, root_domain(g), g);
        SolveConfig cfg;
        cfg.gap_tol = 0.0;
        const SolveReport r = solve(e, zero_penalty(e.n), cfg);
        CHECK(r.status == "ok");
        REQUIRE(r.has_incumbent);
        CHECK(r.incumbent_value == exact.value);
        check_report_sane(r, e, zero_penalty(e.n));
    }
}

TEST_CASE("solve: frozen five-tree fixture, with and without the penalty")
{
    const TreeEnsemble e = load_ensemble(read_file(test::data_path("fixture5.json")));
    const BreakpointGrid g = extract_breakpoints(e);

    SolveConfig cfg;
    cfg.gap_tol = 0.0;

    // Pure tree sum: the known minimum is -1.2 on the cell [8,10) x [0,3).
    const SolveReport plain = solve(e, zero_penalty(2), cfg);
    REQUIRE(plain.has_incumbent);
    CHECK(plain.incumbent_value == doctest::Approx(-1.2).epsilon(1e-12));
    CHECK(plain.incumbent_x[0] >= 8.0);
    CHECK(plain.incumbent_x[0] < 10.0);
    CHECK(plain.incumbent_x[1] >= 0.0);
    CHECK(plain.incumbent_x[1] < 3.0);
    check_report_sane(plain, e, zero_penalty(2));

    // With the fitted quadratic penalty the cell-enumeration oracle decides.
    const Matrix data = load_training_csv(read_file(test::data_path("fixture5_train.csv")));
    PenaltyModel m = fit_pca(data, 1);
    m.lambda = 1.0;
    const SolveReport pen = solve(e, m, cfg);
    const test::OracleResult oracle = test::cell_enumeration_min(e, g, m);
    REQUIRE(pen.has_incumbent);
    CHECK(std::abs(pen.incumbent_value - oracle.value) <= 1e-6);
    check_report_sane(pen, e, m);
}

TEST_CASE("solve: random instances agree with the cell-enumeration oracle")
{
    InstanceGen gen(407);
    GenOptions o;
    o.trees = 5;
    o.max_depth = 3;
    for (int trial = 0; trial < 12; ++trial) {
        o.n = 1 + trial % 3;
        const TreeEnsemble e = gen.ensemble(o);
        const BreakpointGrid g = extract_breakpoints(e);
        const double lambda = trial % 3 == 0 ? 0.0 : (trial % 3 == 1 ? 1.0 : 100.0);
        PenaltyModel m = lambda == 0.0 ? zero_penalty(e.n) : gen.penalty(e.n, lambda);
        SolveConfig cfg;
        cfg.gap_tol = 0.0;
        cfg.subset_size = 1 + trial % 3;
        const SolveReport r = solve(e, m, cfg);
        const test::OracleResult oracle = test::cell_enumeration_min(e, g, m);
        CHECK(r.status == "ok");
        REQUIRE(r.has_incumbent);
        CHECK(std::abs(r.incumbent_value - oracle.value) <= 1e-6);
        CHECK(r.lower_bound <= oracle.value + 1e-9);
        CHECK(r.gap <= 1e-9);
        check_report_sane(r, e, m);
    }
}

TEST_CASE("solve: closure value on an excluded boundary is reported with its witness")
{
    // Left cell [0,5) has tree value 0 and penalty infimum 0 approached at the
    // excluded boundary x = 5; the right cell starts at 100. The solver reports
    // the closure value 0, a witness nudged to the cell midpoint 2.5, and the
    // true evaluation at that witness.
    const TreeEnsemble e = load_ensemble(R"({"n":1,"lower":[0],"upper":[10],"trees":[
        [{"split":{"var":0,"value":5,"left":1,"right":2}},{"leaf":0},{"leaf":100}]]})");
    PenaltyModel m = zero_penalty(1);
    m.mu = {5.0};
    m.lambda = 10.0;
    SolveConfig cfg;
    cfg.gap_tol = 0.0;
    const SolveReport r = solve(e, m, cfg);
    REQUIRE(r.has_incumbent);
    CHECK(r.incumbent_value == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(r.incumbent_x[0] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(r.incumbent_objective == doctest::Approx(62.5).epsilon(1e-8));
}

TEST_CASE("solve: disabling pruning changes work, not the answer")
{
    InstanceGen gen(409);
    GenOptions o;
    o.n = 2;
    o.trees = 4;
    for (int trial = 0; trial < 6; ++trial) {
        const TreeEnsemble e = gen.ensemble(o);
        PenaltyModel m = gen.penalty(2, trial % 2 ? 5.0 : 0.0);
        SolveConfig cfg;
        cfg.gap_tol = 0.0;
        const SolveReport with = solve(e, m, cfg);
        cfg.pruning_enabled = false;
        const SolveReport without = solve(e, m, cfg);
        REQUIRE(with.has_incumbent);
        REQUIRE(without.has_incumbent);
        CHECK(std::abs(with.incumbent_value - without.incumbent_value) <= 1e-9);
        CHECK(without.nodes_pruned == 0);
        CHECK(without.strong_branches_taken == 0);
    }
}

TEST_CASE("solve: node cap yields a flagged partial report with a valid bound")
{
    InstanceGen gen(411);
    GenOptions o;
    o.n = 3;
    o.trees = 6;
    const TreeEnsemble e = gen.ensemble(o);
    const BreakpointGrid g = extract_breakpoints(e);
    PenaltyModel m = gen.penalty(3, 1.0);
    SolveConfig cfg;
    cfg.gap_tol = 0.0;
    cfg.max_nodes = 1;
    const SolveReport r = solve(e, m, cfg);
    CHECK(r.status == "node_limit");
    const test::OracleResult oracle = test::cell_enumeration_min(e, g, m);
    CHECK(r.lower_bound <= oracle.value + 1e-9);
    check_report_sane(r, e, m);
}

TEST_CASE("solve: zero time limit still reports validly")
{
    InstanceGen gen(413);
    GenOptions o;
    o.n = 2;
    o.trees = 5;
    const TreeEnsemble e = gen.ensemble(o);
    PenaltyModel m = gen.penalty(2, 1.0);
    SolveConfig cfg;
    cfg.time_limit = 0.0;
    const SolveReport r = solve(e, m, cfg);
    CHECK(r.status == "time_limit");
    check_report_sane(r, e, m);
}

TEST_CASE("solve: warm start never worsens the incumbent")
{
    InstanceGen gen(417);
    GenOptions o;
    o.n = 2;
    o.trees = 5;
    for (int trial = 0; trial < 5; ++trial) {
        const TreeEnsemble e = gen.ensemble(o);
        PenaltyModel m = gen.penalty(2, 2.0);
        const std::vector<double> x0 = gen.point(e);
        SolveConfig cfg;
        cfg.gap_tol = 0.0;
        cfg.initial_x = x0;
        const SolveReport r = solve(e, m, cfg);
        REQUIRE(r.has_incumbent);
        CHECK(r.incumbent_value <= objective(e, m, x0) + 1e-9);
        check_report_sane(r, e, m);
    }

    const TreeEnsemble e = gen.ensemble(o);
    SolveConfig bad;
    bad.initial_x = {99.0, 99.0};
    CHECK_THROWS_AS(static_cast<void>(solve(e, zero_penalty(2), bad)), InputError);
    SolveConfig short_x;
    short_x.initial_x = {1.0};
    CHECK_THROWS_AS(static_cast<void>(solve(e, zero_penalty(2), short_x)), InputError);
}

TEST_CASE("solve: repeated runs are deterministic")
{
    InstanceGen gen(419);
    GenOptions o;
    o.n = 3;
    o.trees = 6;
    const TreeEnsemble e = gen.ensemble(o);
    PenaltyModel m = gen.penalty(3, 3.0);
    SolveConfig cfg;
    cfg.gap_tol = 0.0;
    const SolveReport a = solve(e, m, cfg);
    const SolveReport b = solve(e, m, cfg);
    CHECK(a.incumbent_value == b.incumbent_value);
    CHECK(a.lower_bound == b.lower_bound);
    CHECK(a.incumbent_x == b.incumbent_x);
    CHECK(a.nodes_processed == b.nodes_processed);
    CHECK(a.nodes_pruned == b.nodes_pruned);
    CHECK(a.strong_branches_taken == b.strong_branches_taken);
    CHECK(a.refinements == b.refinements);
    CHECK(a.events.size() == b.events.size());
}

TEST_CASE("solve: random branch order reaches the same optimum")
{
    InstanceGen gen(421);
    GenOptions o;
    o.n = 2;
    o.trees = 5;
    for (int trial = 0; trial < 5; ++trial) {
        const TreeEnsemble e = gen.ensemble(o);
        PenaltyModel m = gen.penalty(2, trial % 2 ? 10.0 : 0.0);
        SolveConfig cfg;
        cfg.gap_tol = 0.0;
        const SolveReport by_weight = solve(e, m, cfg);
        cfg.branch_order = SolveConfig::BranchOrder::Random;
        cfg.seed = 7 + static_cast<std::uint64_t>(trial);
        const SolveReport by_chance = solve(e, m, cfg);
        REQUIRE(by_weight.has_incumbent);
        REQUIRE(by_chance.has_incumbent);
        CHECK(std::abs(by_weight.incumbent_value - by_chance.incumbent_value) <= 1e-9);
    }
}

TEST_CASE("solve: multithreaded run matches single-threaded")
{
    InstanceGen gen(423);
    GenOptions o;
    o.n = 3;
    o.trees = 8;
    const TreeEnsemble e = gen.ensemble(o);
    PenaltyModel m = gen.penalty(3, 2.0);
    SolveConfig cfg;
    cfg.gap_tol = 0.0;
    cfg.threads = 1;
    const SolveReport seq = solve(e, m, cfg);
    cfg.threads = 4;
    const SolveReport par = solve(e, m, cfg);
    REQUIRE(seq.has_incumbent);
    REQUIRE(par.has_incumbent);
    CHECK(seq.incumbent_value == par.incumbent_value);
    CHECK(seq.incumbent_x == par.incumbent_x);
    CHECK(seq.nodes_processed == par.nodes_processed);
}
