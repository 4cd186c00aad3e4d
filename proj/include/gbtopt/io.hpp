/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <string>
#include <vector>

#include "gbtopt/bb.hpp"
#include "gbtopt/heuristics.hpp"
#include "gbtopt/linalg.hpp"

namespace gbtopt {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/**
 * Training data CSV: one header row naming the columns, then numeric rows.
 * Column order must match the model's variable order. Rejects non-numeric or
 * non-finite entries and ragged rows.
 */
Matrix load_training_csv(const std::string& text);

/** Everything the CLI can configure, loadable from a JSON config file. */
struct CliConfig {
    SolveConfig solve;
    std::string model_path;
    std::string data_path;
    std::string log_csv;     // bound/heuristic progress CSV destination
    std::string report_path; // JSON report destination
    double lambda = 0.0;
    int rank = 1;
    std::vector<int> mixture_indices;
    double mixture_target = 100.0;
    bool has_mixture = false;
    std::string heur_method = "incremental"; // incremental | pso | sa
    std::string heur_strategy = "order";     // order | best | random
    int heur_step = 10;                      // trees added per incremental round
};

std::string config_to_json(const CliConfig& c);
CliConfig config_from_json(const std::string& text);

/**
 * Solve report as JSON: status, incumbent, bounds, counters, timings, the
 * configuration that produced it, and the bound-log path when one was written.
 */
std::string report_to_json(const SolveReport& r, const CliConfig& config,
                           const std::string& log_path = "");

/** Bound-evolution log: wall_ms,event,node_id,lb,ub,gap. */
std::string bound_log_csv(const std::vector<BoundEvent>& events);

/** Heuristic progress log: iter,wall_ms,value. */
std::string heuristic_log_csv(const std::vector<HeurIteration>& iters);

/** Search region as JSON ({"lo": [...], "hi": [...]}, breakpoint indices). */
std::string domain_to_json(const NodeDomain& d);
NodeDomain domain_from_json(const std::string& text);

} // namespace gbtopt
