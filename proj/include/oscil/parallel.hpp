#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace oscil {

/// Degree-of-parallelism hint: explicit value, else OSCIL_THREADS env var,
/// else hardware concurrency.  Results never depend on it; only wall time.
inline unsigned resolve_threads(unsigned hint = 0) {
    if (hint > 0) return hint;
    if (const char* env = std::getenv("OSCIL_THREADS")) {
        long v = std::atol(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Runs fn(chunk_begin, chunk_end) over [0, n) partitioned into contiguous
/// chunks.  Each chunk writes only its own outputs; callers combine chunk
/// results in index order, so the aggregate is independent of the thread
/// count (all per-item work is exact arithmetic).
inline void parallel_chunks(long n, unsigned threads_hint,
                            const std::function<void(long, long)>& fn) {
    unsigned nthreads = resolve_threads(threads_hint);
    if (n <= 0) return;
    if (nthreads <= 1 || n == 1) {
        fn(0, n);
        return;
    }
    long nt = static_cast<long>(nthreads);
    if (nt > n) nt = n;
    std::vector<std::thread> workers;
    workers.reserve(nt);
    long chunk = (n + nt - 1) / nt;
    for (long t = 0; t < nt; ++t) {
        long b = t * chunk, e = b + chunk < n ? b + chunk : n;
        if (b >= e) break;
        workers.emplace_back(fn, b, e);
    }
    for (auto& w : workers) w.join();
}

}  // namespace oscil
