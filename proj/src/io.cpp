/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "gbtopt/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gbtopt/errors.hpp"
#include <json.hpp>
#include "gbtopt/version.hpp"

namespace gbtopt {

using nlohmann::json;

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write file: " + path);
    out << content;
    if (!out)
        throw InputError("write failed: " + path);
}

static std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

Matrix load_training_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw InputError("training data is empty");
    const size_t cols = split_line(line).size();
    if (cols == 0)
        throw InputError("training data has no columns");

    std::vector<double> values;
    size_t rows = 0;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r")
            continue;
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() != cols)
            throw InputError("training data line " + std::to_string(lineno) +
                             ": expected " + std::to_string(cols) + " fields, got " +
                             std::to_string(fields.size()));
        for (const std::string& f : fields) {
            size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(f, &used);
            } catch (const std::exception&) {
                throw InputError("training data line " + std::to_string(lineno) +
                                 ": not a number: '" + f + "'");
            }
            while (used < f.size() && (f[used] == ' ' || f[used] == '\t'))
                ++used;
            if (used != f.size())
                throw InputError("training data line " + std::to_string(lineno) +
                                 ": not a number: '" + f + "'");
            if (!std::isfinite(v))
                throw InputError("training data line " + std::to_string(lineno) +
                                 ": non-finite value");
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0)
        throw InputError("training data has no rows");

    Matrix m(rows, cols);
    m.a = std::move(values);
    return m;
}

static std::string fmt17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

static json config_json(const CliConfig& c)
{
    json j;
    j["model"] = c.model_path;
    j["data"] = c.data_path;
    j["log_csv"] = c.log_csv;
    j["report"] = c.report_path;
    j["lambda"] = c.lambda;
    j["rank"] = c.rank;
    if (c.has_mixture) {
        j["mixture_indices"] = c.mixture_indices;
        j["mixture_target"] = c.mixture_target;
    }
    json h;
    h["method"] = c.heur_method;
    h["strategy"] = c.heur_strategy;
    h["step"] = c.heur_step;
    j["heuristic"] = h;
    json s;
    s["subset_size"] = c.solve.subset_size;
    s["lookahead"] = c.solve.lookahead;
    s["refine_limit"] = c.solve.refine_limit;
    s["gap_tol"] = c.solve.gap_tol;
    s["time_limit"] = c.solve.time_limit;
    s["max_nodes"] = c.solve.max_nodes;
    s["seed"] = c.solve.seed;
    s["branch_order"] =
        c.solve.branch_order == SolveConfig::BranchOrder::Random ? "random" : "weight";
    s["threads"] = c.solve.threads;
    s["pruning_enabled"] = c.solve.pruning_enabled;
    s["prune_margin"] = c.solve.prune_margin;
    json cv;
    cv["stationarity_tol"] = c.solve.convex.stationarity_tol;
    cv["backoff"] = c.solve.convex.backoff;
    cv["max_iterations"] = c.solve.convex.max_iterations;
    s["convex"] = cv;
    j["solve"] = s;
    return j;
}

std::string config_to_json(const CliConfig& c)
{
    return config_json(c).dump(2) + "\n";
}

CliConfig config_from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw InputError("config must be a JSON object");
    CliConfig c;
    try {
        if (j.contains("model")) c.model_path = j.at("model").get<std::string>();
        if (j.contains("data")) c.data_path = j.at("data").get<std::string>();
        if (j.contains("log_csv")) c.log_csv = j.at("log_csv").get<std::string>();
        if (j.contains("report")) c.report_path = j.at("report").get<std::string>();
        if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
        if (j.contains("rank")) c.rank = j.at("rank").get<int>();
        if (j.contains("mixture_indices")) {
            c.mixture_indices = j.at("mixture_indices").get<std::vector<int>>();
            c.has_mixture = true;
        }
        if (j.contains("mixture_target"))
            c.mixture_target = j.at("mixture_target").get<double>();
        if (j.contains("heuristic")) {
            const json& h = j.at("heuristic");
            if (h.contains("method")) c.heur_method = h.at("method").get<std::string>();
            if (h.contains("strategy")) c.heur_strategy = h.at("strategy").get<std::string>();
            if (h.contains("step")) c.heur_step = h.at("step").get<int>();
        }
        if (j.contains("solve")) {
            const json& s = j.at("solve");
            if (s.contains("subset_size")) c.solve.subset_size = s.at("subset_size").get<int>();
            if (s.contains("lookahead")) c.solve.lookahead = s.at("lookahead").get<int>();
            if (s.contains("refine_limit")) c.solve.refine_limit = s.at("refine_limit").get<double>();
            if (s.contains("gap_tol")) c.solve.gap_tol = s.at("gap_tol").get<double>();
            if (s.contains("time_limit")) c.solve.time_limit = s.at("time_limit").get<double>();
            if (s.contains("max_nodes")) c.solve.max_nodes = s.at("max_nodes").get<long>();
            if (s.contains("seed")) c.solve.seed = s.at("seed").get<std::uint64_t>();
            if (s.contains("branch_order")) {
                const std::string o = s.at("branch_order").get<std::string>();
                if (o == "random")
                    c.solve.branch_order = SolveConfig::BranchOrder::Random;
                else if (o == "weight")
                    c.solve.branch_order = SolveConfig::BranchOrder::Weight;
                else
                    throw InputError("config: unknown branch_order '" + o + "'");
            }
            if (s.contains("threads")) c.solve.threads = s.at("threads").get<int>();
            if (s.contains("pruning_enabled"))
                c.solve.pruning_enabled = s.at("pruning_enabled").get<bool>();
            if (s.contains("prune_margin"))
                c.solve.prune_margin = s.at("prune_margin").get<double>();
            if (s.contains("convex")) {
                const json& cv = s.at("convex");
                if (cv.contains("stationarity_tol"))
                    c.solve.convex.stationarity_tol = cv.at("stationarity_tol").get<double>();
                if (cv.contains("backoff"))
                    c.solve.convex.backoff = cv.at("backoff").get<double>();
                if (cv.contains("max_iterations"))
                    c.solve.convex.max_iterations = cv.at("max_iterations").get<int>();
            }
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("config field has wrong type: ") + e.what());
    }
    return c;
}

std::string report_to_json(const SolveReport& r, const CliConfig& config,
                           const std::string& log_path)
{
    json j;
    j["report_version"] = kReportVersion;
    j["tool_version"] = kToolVersion;
    j["status"] = r.status;
    j["has_incumbent"] = r.has_incumbent;
    if (r.has_incumbent) {
        j["incumbent_value"] = r.incumbent_value;
        j["incumbent_objective"] = r.incumbent_objective;
        j["incumbent_x"] = r.incumbent_x;
    }
    j["lower_bound"] = r.lower_bound;
    j["gap"] = r.gap;
    j["nodes_processed"] = r.nodes_processed;
    j["nodes_pruned"] = r.nodes_pruned;
    j["strong_branches_taken"] = r.strong_branches_taken;
    j["refinements"] = r.refinements;
    j["root_ms"] = r.root_ms;
    j["search_ms"] = r.search_ms;
    j["total_ms"] = r.total_ms;
    j["events"] = r.events.size();
    j["config"] = config_json(config);
    if (!log_path.empty())
        j["bound_log"] = log_path;
    return j.dump(2) + "\n";
}

std::string bound_log_csv(const std::vector<BoundEvent>& events)
{
    std::string out = "wall_ms,event,node_id,lb,ub,gap\n";
    char buf[256];
    for (const BoundEvent& e : events) {
        std::snprintf(buf, sizeof(buf), "%.3f,%s,%ld,%s,%s,%s\n", e.wall_ms,
                      e.event.c_str(), e.node_id, fmt17(e.lb).c_str(),
                      fmt17(e.ub).c_str(), fmt17(e.gap).c_str());
        out += buf;
    }
    return out;
}

std::string heuristic_log_csv(const std::vector<HeurIteration>& iters)
{
    std::string out = "iter,wall_ms,value\n";
    char buf[160];
    for (const HeurIteration& it : iters) {
        std::snprintf(buf, sizeof(buf), "%d,%.3f,%s\n", it.iter, it.wall_ms,
                      fmt17(it.value).c_str());
        out += buf;
    }
    return out;
}

std::string domain_to_json(const NodeDomain& d)
{
    json j;
    j["lo"] = d.lo;
    j["hi"] = d.hi;
    return j.dump() + "\n";
}

NodeDomain domain_from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("region is not valid JSON: ") + e.what());
    }
    NodeDomain d;
    try {
        d.lo = j.at("lo").get<std::vector<std::int32_t>>();
        d.hi = j.at("hi").get<std::vector<std::int32_t>>();
    } catch (const json::exception& e) {
        throw InputError(std::string("region must have integer arrays lo/hi: ") + e.what());
    }
    if (d.lo.size() != d.hi.size())
        throw InputError("region lo/hi length mismatch");
    return d;
}

} // namespace gbtopt
