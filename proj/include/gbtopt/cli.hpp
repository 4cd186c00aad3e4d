/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gbtopt {

/**
 * Run the command-line tool: args are the arguments after the program name.
 * Subcommands: solve, bound, heuristic, export-milp, check, evaluate, stats.
 * Returns the process exit code: 0 success, 1 usage error, 2 invalid input,
 * 3 limit-hit partial result.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gbtopt
