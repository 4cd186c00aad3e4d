/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <vector>

namespace gbtopt {

/**
 * Axis-aligned search region in breakpoint-index space. For variable i the
 * region is [grid value at lo[i], grid value at hi[i]), closed at the global
 * upper bound when hi[i] is the last grid index. Always nonempty: lo < hi.
 */
struct NodeDomain {
    std::vector<std::int32_t> lo, hi;

    bool operator==(const NodeDomain& o) const { return lo == o.lo && hi == o.hi; }
};

/** True when every interval has unit width, i.e. the region is a single cell. */
inline bool is_cell(const NodeDomain& d) {
    for (std::size_t i = 0; i < d.lo.size(); ++i)
        if (d.hi[i] != d.lo[i] + 1) return false;
    return true;
}

} // namespace gbtopt
