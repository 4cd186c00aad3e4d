/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 gbtopt contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <optional>
#include <thread>
#include <vector>

namespace gbtopt {

/** Wall-clock deadline; absent means unlimited. */
struct Deadline {
    std::optional<std::chrono::steady_clock::time_point> at;

    static Deadline after_seconds(double s) {
        Deadline d;
        if (s >= 0 && s < 1e17)
            d.at = std::chrono::steady_clock::now() +
                   std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                       std::chrono::duration<double>(s));
        return d;
    }
    static Deadline unlimited() { return {}; }
    bool expired() const { return at && std::chrono::steady_clock::now() >= *at; }
};

/** Effective worker count: explicit request wins, then GBTOPT_THREADS, then 1. */
inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GBTOPT_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

/**
 * Run f(i) for i in [0, n). Items are claimed in index order from a shared
 * counter; stop(i) is checked immediately before item i starts, so no item
 * starts once stop reports true, and items already running complete. stop
 * must be monotone (once true, it stays true — e.g. a deadline check).
 * With threads <= 1 this is a plain sequential loop.
 */
template <class F, class Stop>
void parallel_for_prefix(int n, int threads, Stop&& stop, F&& f) {
    if (n <= 0) return;
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) {
            if (stop(i)) break;
            f(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> halted{false};
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n || halted.load()) return;
            if (stop(i)) {
                halted.store(true);
                return;
            }
            f(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

template <class F>
void parallel_for(int n, int threads, F&& f) {
    parallel_for_prefix(
        n, threads, [](int) { return false; }, std::forward<F>(f));
}

} // namespace gbtopt
