/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "gbtopt/cli.hpp"

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gbtopt/bb.hpp"
#include "gbtopt/bounding.hpp"
#include "gbtopt/ensemble.hpp"
#include "gbtopt/errors.hpp"
#include "gbtopt/heuristics.hpp"
#include "gbtopt/io.hpp"
#include "gbtopt/milp_export.hpp"
#include "gbtopt/penalty.hpp"
#include "gbtopt/version.hpp"

namespace gbtopt {
namespace {

std::string g17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string gshort(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string join(const std::vector<double>& v)
{
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ", ";
        s += gshort(v[i]);
    }
    return s;
}

/** Penalty built from the merged config; zero when no training data given. */
PenaltyModel build_penalty(const TreeEnsemble& e, const CliConfig& c)
{
    if (c.lambda < 0.0)
        throw InputError("lambda must be nonnegative");
    PenaltyModel m;
    if (!c.data_path.empty()) {
        const Matrix data = load_training_csv(read_file(c.data_path));
        if (static_cast<int>(data.cols) != e.n)
            throw InputError("training data has " + std::to_string(data.cols) +
                             " columns but the model has " + std::to_string(e.n) +
                             " variables");
        m = fit_pca(data, c.rank);
        m.lambda = c.lambda;
    } else {
        if (c.lambda != 0.0)
            throw InputError("--lambda requires --data (the projection is fit from training data)");
        m = zero_penalty(e.n);
    }
    if (c.has_mixture)
        m.mixture = MixtureTerm{c.mixture_indices, c.mixture_target};
    validate_penalty(m, e.n);
    return m;
}

void apply_branch_order(const std::string& s, SolveConfig& cfg)
{
    if (s == "weight") {
        cfg.branch_order = SolveConfig::BranchOrder::Weight;
        return;
    }
    if (s.rfind("random", 0) == 0) {
        cfg.branch_order = SolveConfig::BranchOrder::Random;
        if (s.size() == 6)
            return;
        if (s[6] != ':')
            throw InputError("--branch-order must be 'weight' or 'random[:seed]'");
        const std::string tail = s.substr(7);
        size_t used = 0;
        unsigned long long seed = 0;
        try {
            seed = std::stoull(tail, &used);
        } catch (const std::exception&) {
            throw InputError("--branch-order random seed is not a number: '" + tail + "'");
        }
        if (used != tail.size() || tail.empty())
            throw InputError("--branch-order random seed is not a number: '" + tail + "'");
        cfg.seed = seed;
        return;
    }
    throw InputError("--branch-order must be 'weight' or 'random[:seed]'");
}

void validate_numeric(const CliConfig& c)
{
    if (c.lambda < 0.0)
        throw InputError("lambda must be nonnegative");
    if (c.rank < 1)
        throw InputError("rank must be at least 1");
    if (c.solve.subset_size < 0)
        throw InputError("subset size must be nonnegative (0 = automatic)");
    if (c.solve.lookahead < 0)
        throw InputError("lookahead must be nonnegative");
    if (c.solve.gap_tol < 0.0)
        throw InputError("gap tolerance must be nonnegative");
    if (c.heur_step < 1)
        throw InputError("heuristic step must be at least 1");
}

struct SolveFlags {
    std::string model, data, config, log_csv, report, branch_order;
    double lambda = 0.0;
    int rank = 1;
    std::vector<int> mixture_indices;
    double mixture_target = 100.0;
    int subset_size = 0, lookahead = 100, threads = 0;
    double refine_limit = 120.0, gap_tol = 1e-6, time_limit = -1.0;
    long max_nodes = -1;
    std::uint64_t seed = 0;
    bool no_pruning = false;
    std::vector<double> start;
};

/** Option pointers so explicit flags can override config-file values. */
struct SolveOpts {
    CLI::Option *model = nullptr, *data = nullptr, *log_csv = nullptr, *report = nullptr;
    CLI::Option *lambda = nullptr, *rank = nullptr, *mix_idx = nullptr, *mix_tgt = nullptr;
    CLI::Option *subset = nullptr, *lookahead = nullptr, *refine = nullptr, *gap = nullptr;
    CLI::Option *time = nullptr, *nodes = nullptr, *seed = nullptr, *order = nullptr;
    CLI::Option *threads = nullptr, *no_pruning = nullptr, *start = nullptr;
};

void add_penalty_options(CLI::App* sc, SolveFlags& f, SolveOpts& o)
{
    o.data = sc->add_option("--data", f.data, "Training data CSV (header row + numeric rows)");
    o.lambda = sc->add_option("--lambda", f.lambda, "Penalty weight (requires --data)");
    o.rank = sc->add_option("--rank", f.rank, "Number of leading components kept by the fit");
    o.mix_idx = sc->add_option("--mixture-indices", f.mixture_indices,
                               "Variable indices whose sum is driven to the mixture target")
                    ->delimiter(',');
    o.mix_tgt = sc->add_option("--mixture-target", f.mixture_target,
                               "Target for the mixture sum (default 100)");
}

CliConfig merge_config(const SolveFlags& f, const SolveOpts& o)
{
    CliConfig c;
    if (!f.config.empty())
        c = config_from_json(read_file(f.config));
    if (o.model && o.model->count()) c.model_path = f.model;
    if (o.data && o.data->count()) c.data_path = f.data;
    if (o.log_csv && o.log_csv->count()) c.log_csv = f.log_csv;
    if (o.report && o.report->count()) c.report_path = f.report;
    if (o.lambda && o.lambda->count()) c.lambda = f.lambda;
    if (o.rank && o.rank->count()) c.rank = f.rank;
    if (o.mix_idx && o.mix_idx->count()) {
        c.mixture_indices = f.mixture_indices;
        c.has_mixture = true;
    }
    if (o.mix_tgt && o.mix_tgt->count()) c.mixture_target = f.mixture_target;
    if (o.subset && o.subset->count()) c.solve.subset_size = f.subset_size;
    if (o.lookahead && o.lookahead->count()) c.solve.lookahead = f.lookahead;
    if (o.refine && o.refine->count()) c.solve.refine_limit = f.refine_limit;
    if (o.gap && o.gap->count()) c.solve.gap_tol = f.gap_tol;
    if (o.time && o.time->count()) c.solve.time_limit = f.time_limit;
    if (o.nodes && o.nodes->count()) c.solve.max_nodes = f.max_nodes;
    if (o.seed && o.seed->count()) c.solve.seed = f.seed;
    if (o.threads && o.threads->count()) c.solve.threads = f.threads;
    if (o.no_pruning && o.no_pruning->count()) c.solve.pruning_enabled = false;
    // Applied last so an explicit random:seed suffix wins over --seed.
    if (o.order && o.order->count()) apply_branch_order(f.branch_order, c.solve);
    if (o.start && o.start->count()) c.solve.initial_x = f.start;
    validate_numeric(c);
    return c;
}

int run_solve(const SolveFlags& f, const SolveOpts& o, std::ostream& out)
{
    const CliConfig cfg = merge_config(f, o);
    if (cfg.model_path.empty())
        throw InputError("solve requires --model");
    const TreeEnsemble e = load_ensemble(read_file(cfg.model_path));
    const PenaltyModel model = build_penalty(e, cfg);

    const SolveReport r = solve(e, model, cfg.solve);

    if (!cfg.log_csv.empty())
        write_file(cfg.log_csv, bound_log_csv(r.events));
    if (!cfg.report_path.empty())
        write_file(cfg.report_path, report_to_json(r, cfg, cfg.log_csv));

    out << "status: " << r.status << "\n";
    out << "nodes: " << r.nodes_processed << " processed, " << r.nodes_pruned << " pruned\n";
    out << "strong branches: " << r.strong_branches_taken << "\n";
    out << "refinements: " << r.refinements << "\n";
    char tbuf[64];
    std::snprintf(tbuf, sizeof(tbuf), "%.1f", r.total_ms);
    out << "time: " << tbuf << " ms\n";
    if (r.has_incumbent)
        out << "x*: " << join(r.incumbent_x) << "\n";
    char line[256];
    if (r.has_incumbent)
        std::snprintf(line, sizeof(line), "f* = %.17g  LB = %.17g  gap = %.6f\n",
                      r.incumbent_value, r.lower_bound, r.gap);
    else
        std::snprintf(line, sizeof(line), "f* = none  LB = %.17g  gap = inf\n", r.lower_bound);
    out << line;
    return r.status == "ok" ? 0 : 3;
}

int run_bound(const std::string& model_path, int subset_size, const std::string& domain_arg,
              const std::string& out_path, std::ostream& out)
{
    if (subset_size < 0)
        throw InputError("subset size must be nonnegative (0 = automatic)");
    const TreeEnsemble e = load_ensemble(read_file(model_path));
    const BreakpointGrid grid = extract_breakpoints(e);
    NodeDomain domain;
    if (domain_arg == "full") {
        domain = root_domain(grid);
    } else {
        domain = domain_from_json(read_file(domain_arg));
        if (domain.lo.size() != static_cast<size_t>(e.n))
            throw InputError("region dimension does not match the model");
        for (int i = 0; i < e.n; ++i) {
            if (domain.lo[i] < 0 || domain.hi[i] > grid.last_index(i) ||
                domain.lo[i] >= domain.hi[i])
                throw InputError("region interval is out of range for variable " +
                                 std::to_string(i));
        }
    }

    const int size = subset_size > 0
                         ? subset_size
                         : std::max(1, static_cast<int>(e.trees.size()) / 110);
    Partition p = root_partition(e, size);

    std::string csv = "block_id,size,leaves,bound,wall_ms\n";
    double total_bound = 0.0;
    long total_leaves = 0;
    size_t total_trees = 0;
    double total_ms = 0.0;
    char buf[256];
    for (Block& b : p.blocks) {
        Partition one;
        one.blocks.push_back(b);
        const auto t0 = std::chrono::steady_clock::now();
        const double bound = partition_bound(one, e, domain, grid, 1);
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        const Block& solved = one.blocks.front();
        std::snprintf(buf, sizeof(buf), "%d,%zu,%ld,%s,%.3f\n", solved.id, solved.trees.size(),
                      solved.leaves, g17(bound).c_str(), ms);
        csv += buf;
        total_bound += bound;
        total_leaves += solved.leaves;
        total_trees += solved.trees.size();
        total_ms += ms;
    }
    std::snprintf(buf, sizeof(buf), "total,%zu,%ld,%s,%.3f\n", total_trees, total_leaves,
                  g17(total_bound).c_str(), total_ms);
    csv += buf;

    if (out_path.empty())
        out << csv;
    else
        write_file(out_path, csv);
    out << "tree bound = " << g17(total_bound) << "\n";
    return 0;
}

int run_heuristic(const SolveFlags& f, const SolveOpts& o, const std::string& method,
                  const std::string& strategy, int step, int particles, int iterations,
                  double alpha, int inner_iters, std::ostream& out)
{
    CliConfig cfg = merge_config(f, o);
    cfg.heur_method = method;
    cfg.heur_strategy = strategy;
    cfg.heur_step = step;
    validate_numeric(cfg);
    if (cfg.model_path.empty())
        throw InputError("heuristic requires --model");
    const TreeEnsemble e = load_ensemble(read_file(cfg.model_path));
    const PenaltyModel model = build_penalty(e, cfg);

    HeurResult r;
    if (cfg.heur_method == "incremental") {
        IncrementalConfig ic;
        if (cfg.heur_strategy == "order")
            ic.strategy = TreeSelect::TrainingOrder;
        else if (cfg.heur_strategy == "best")
            ic.strategy = TreeSelect::BestImprovement;
        else if (cfg.heur_strategy == "random")
            ic.strategy = TreeSelect::Random;
        else
            throw InputError("--strategy must be order, best, or random");
        ic.step = cfg.heur_step;
        ic.time_limit = cfg.solve.time_limit;
        ic.seed = cfg.solve.seed;
        ic.inner.threads = cfg.solve.threads;
        r = incremental_minlp(e, model, ic);
    } else if (cfg.heur_method == "pso") {
        PsoConfig pc;
        pc.particles = particles;
        pc.iterations = iterations;
        pc.seed = cfg.solve.seed;
        pc.time_limit = cfg.solve.time_limit;
        pc.threads = cfg.solve.threads;
        if (pc.particles < 1 || pc.iterations < 0)
            throw InputError("pso needs at least one particle and a nonnegative iteration count");
        r = particle_swarm(make_objective(e, model), e.lower, e.upper, model, pc);
    } else if (cfg.heur_method == "sa") {
        SaConfig sc;
        sc.alpha = alpha;
        sc.inner_iters = inner_iters;
        sc.seed = cfg.solve.seed;
        sc.time_limit = cfg.solve.time_limit;
        if (sc.inner_iters < 1)
            throw InputError("sa needs at least one move per temperature");
        r = simulated_annealing(make_objective(e, model), e.lower, e.upper, sc);
    } else {
        throw InputError("--method must be incremental, pso, or sa");
    }

    if (!cfg.log_csv.empty())
        write_file(cfg.log_csv, heuristic_log_csv(r.log));

    out << "status: " << r.status << "\n";
    out << "x: " << join(r.x) << "\n";
    out << "value = " << g17(r.value) << "\n";
    return 0; // heuristics are anytime: a time-limited run still yields its answer
}

int run_export(const SolveFlags& f, const SolveOpts& o, const std::string& out_path,
               std::ostream& out)
{
    const CliConfig cfg = merge_config(f, o);
    if (cfg.model_path.empty())
        throw InputError("export-milp requires --model");
    const TreeEnsemble e = load_ensemble(read_file(cfg.model_path));
    const PenaltyModel model = build_penalty(e, cfg);
    const BreakpointGrid grid = extract_breakpoints(e);
    const std::string lp = export_milp(e, grid, model);
    if (out_path.empty())
        out << lp;
    else
        write_file(out_path, lp);
    return 0;
}

int run_check(const SolveFlags& f, const SolveOpts& o, const std::string& solution_path,
              double tol, std::ostream& out)
{
    const CliConfig cfg = merge_config(f, o);
    if (cfg.model_path.empty())
        throw InputError("check requires --model");
    const TreeEnsemble e = load_ensemble(read_file(cfg.model_path));
    const PenaltyModel model = build_penalty(e, cfg);
    const BreakpointGrid grid = extract_breakpoints(e);
    const MilpAssignment a = parse_solution_csv(read_file(solution_path), e.n);
    const CheckVerdict v = check_solution(e, grid, model, a, tol);
    out << (v.consistent ? "consistent\n" : "inconsistent\n");
    for (const std::string& s : v.violations)
        out << "violation: " << s << "\n";
    out << "assignment objective = " << g17(v.assignment_objective) << "\n";
    out << "native objective = " << g17(v.native_objective) << "\n";
    out << "discrepancy = " << g17(v.discrepancy) << "\n";
    return v.consistent ? 0 : 2;
}

int run_evaluate(const SolveFlags& f, const SolveOpts& o, const std::vector<double>& point,
                 std::ostream& out)
{
    const CliConfig cfg = merge_config(f, o);
    if (cfg.model_path.empty())
        throw InputError("evaluate requires --model");
    const TreeEnsemble e = load_ensemble(read_file(cfg.model_path));
    const PenaltyModel model = build_penalty(e, cfg);
    if (point.size() != static_cast<size_t>(e.n))
        throw InputError("--point needs " + std::to_string(e.n) + " comma-separated values");
    const double value = penalty_eval(model, point) + evaluate_ensemble(e, point);
    out << gshort(value) << "\n";
    return 0;
}

int run_stats(const std::string& model_path, std::ostream& out)
{
    const TreeEnsemble e = load_ensemble(read_file(model_path));
    const EnsembleStats s = ensemble_stats(e);
    out << "trees = " << s.tree_count << "\n";
    out << "leaves = " << s.leaf_count << "\n";
    out << "max_depth = " << s.max_depth << "\n";
    out << "breakpoints = " << s.binary_var_count << "\n";
    out << "combination_log2 = " << gshort(s.combination_log2) << "\n";
    out << "pair_checks = " << s.pair_checks << "\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Global optimizer for tree-ensemble outputs with a convex penalty"};
    app.require_subcommand(1);
    const std::string version = std::string("gbtopt ") + kToolVersion +
                                " (model schema " + std::to_string(kEnsembleSchemaVersion) +
                                ", lp format " + std::to_string(kLpFormatVersion) +
                                ", report " + std::to_string(kReportVersion) + ")";
    app.set_version_flag("--version", version);

    SolveFlags sf;
    SolveOpts so;
    CLI::App* solve_cmd = app.add_subcommand("solve", "Minimize penalty + tree sum to optimality");
    so.model = solve_cmd->add_option("--model", sf.model, "Model JSON file");
    add_penalty_options(solve_cmd, sf, so);
    so.subset = solve_cmd->add_option("--subset-size", sf.subset_size,
                                      "Trees per root block (0 = automatic)");
    so.lookahead = solve_cmd->add_option("--lookahead", sf.lookahead,
                                         "Candidates scanned per strong-branching attempt");
    so.refine = solve_cmd->add_option("--refine-limit", sf.refine_limit,
                                      "Seconds per refinement pass");
    so.gap = solve_cmd->add_option("--gap-tol", sf.gap_tol, "Relative gap to stop at");
    so.time = solve_cmd->add_option("--time-limit", sf.time_limit,
                                    "Wall-clock budget in seconds (<0 = unlimited)");
    so.nodes = solve_cmd->add_option("--max-nodes", sf.max_nodes,
                                     "Processed-node cap (<0 = unlimited)");
    so.seed = solve_cmd->add_option("--seed", sf.seed, "Seed for randomized choices");
    so.order = solve_cmd->add_option("--branch-order", sf.branch_order,
                                     "Candidate order: weight | random[:seed]");
    so.threads = solve_cmd->add_option("--threads", sf.threads,
                                       "Worker threads (0 = GBTOPT_THREADS or 1)");
    so.no_pruning = solve_cmd->add_flag("--no-pruning", sf.no_pruning,
                                        "Diagnostics: keep every node and skip strong branching");
    so.start = solve_cmd->add_option("--start", sf.start, "Warm-start point a,b,...")
                   ->delimiter(',');
    so.log_csv = solve_cmd->add_option("--log-csv", sf.log_csv, "Bound-evolution CSV destination");
    so.report = solve_cmd->add_option("--report", sf.report, "JSON report destination");
    solve_cmd->add_option("--config", sf.config, "JSON config file (flags override it)");

    std::string bound_model, bound_domain = "full", bound_out;
    int bound_subset = 0;
    CLI::App* bound_cmd =
        app.add_subcommand("bound", "Per-block lower bounds for the full box or a region");
    bound_cmd->add_option("--model", bound_model, "Model JSON file")->required();
    bound_cmd->add_option("--subset-size", bound_subset, "Trees per block (0 = automatic)");
    bound_cmd->add_option("--domain", bound_domain,
                          "'full' or a JSON file with breakpoint-index arrays lo/hi");
    bound_cmd->add_option("-o,--out", bound_out, "CSV destination (default: standard output)");

    SolveFlags hf;
    SolveOpts ho;
    std::string heur_method = "incremental", heur_strategy = "order";
    int heur_step = 10, heur_particles = 500, heur_iterations = 100, heur_inner = 100;
    double heur_alpha = 0.9;
    CLI::App* heur_cmd = app.add_subcommand("heuristic", "Fast feasible points without a bound");
    ho.model = heur_cmd->add_option("--model", hf.model, "Model JSON file");
    add_penalty_options(heur_cmd, hf, ho);
    heur_cmd->add_option("--method", heur_method, "incremental | pso | sa");
    heur_cmd->add_option("--strategy", heur_strategy,
                         "Tree pick for incremental: order | best | random");
    heur_cmd->add_option("--step", heur_step, "Trees added per incremental round");
    heur_cmd->add_option("--particles", heur_particles, "Swarm size");
    heur_cmd->add_option("--iterations", heur_iterations, "Swarm iterations");
    heur_cmd->add_option("--alpha", heur_alpha, "Annealing cooling factor in [0.80, 0.99]");
    heur_cmd->add_option("--inner-iters", heur_inner, "Annealing moves per temperature");
    ho.seed = heur_cmd->add_option("--seed", hf.seed, "Seed for randomized choices");
    ho.time = heur_cmd->add_option("--time-limit", hf.time_limit,
                                   "Wall-clock budget in seconds (<0 = unlimited)");
    ho.threads = heur_cmd->add_option("--threads", hf.threads,
                                      "Worker threads (0 = GBTOPT_THREADS or 1)");
    ho.log_csv = heur_cmd->add_option("--log-csv", hf.log_csv, "Progress CSV destination");

    SolveFlags xf;
    SolveOpts xo;
    std::string export_out;
    CLI::App* export_cmd =
        app.add_subcommand("export-milp", "Write the equivalent mixed-integer model as LP text");
    xo.model = export_cmd->add_option("--model", xf.model, "Model JSON file");
    add_penalty_options(export_cmd, xf, xo);
    export_cmd->add_option("-o,--out", export_out, "LP destination (default: standard output)");

    SolveFlags cf;
    SolveOpts co;
    std::string check_solution_path;
    double check_tol = 1e-6;
    CLI::App* check_cmd =
        app.add_subcommand("check", "Verify a solver assignment against the exported rows");
    co.model = check_cmd->add_option("--model", cf.model, "Model JSON file");
    add_penalty_options(check_cmd, cf, co);
    check_cmd->add_option("--solution", check_solution_path, "name,value CSV")->required();
    check_cmd->add_option("--tol", check_tol, "Row tolerance");

    SolveFlags ef;
    SolveOpts eo;
    std::vector<double> eval_point;
    CLI::App* eval_cmd = app.add_subcommand("evaluate", "Objective value at a point");
    eo.model = eval_cmd->add_option("--model", ef.model, "Model JSON file");
    add_penalty_options(eval_cmd, ef, eo);
    eval_cmd->add_option("--point", eval_point, "Point a,b,...")->delimiter(',')->required();

    std::string stats_model;
    CLI::App* stats_cmd = app.add_subcommand("stats", "Model size counters");
    stats_cmd->add_option("--model", stats_model, "Model JSON file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve_cmd->parsed())
            return run_solve(sf, so, out);
        if (bound_cmd->parsed())
            return run_bound(bound_model, bound_subset, bound_domain, bound_out, out);
        if (heur_cmd->parsed())
            return run_heuristic(hf, ho, heur_method, heur_strategy, heur_step, heur_particles,
                                 heur_iterations, heur_alpha, heur_inner, out);
        if (export_cmd->parsed())
            return run_export(xf, xo, export_out, out);
        if (check_cmd->parsed())
            return run_check(cf, co, check_solution_path, check_tol, out);
        if (eval_cmd->parsed())
            return run_evaluate(ef, eo, eval_point, out);
        if (stats_cmd->parsed())
            return run_stats(stats_model, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const LimitError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace gbtopt
