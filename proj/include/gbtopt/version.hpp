/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

namespace gbtopt {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kEnsembleSchemaVersion = 1;
inline constexpr int kLpFormatVersion = 1;
inline constexpr int kReportVersion = 1;

} // namespace gbtopt
