// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <thread>
#include <vector>

#include "memwalk/kernel.hpp"
#include "memwalk/sampler.hpp"
#include "memwalk/shape.hpp"

namespace memwalk {

/// Parameters of one Monte Carlo run. Replica k draws from stream
/// stream_offset + k, so results are a pure function of the configuration,
/// independent of how replicas are distributed across threads.
struct RunConfig {
    Kernel kernel;
    double c = 1.0;
    std::size_t replicas = 1;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_offset = 0;
    int threads = 0; ///< 0 = hardware concurrency
    SamplerOptions sampler{};
};

namespace detail {

inline int resolve_threads(int requested, std::size_t jobs) {
    int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    if (static_cast<std::size_t>(t) > jobs) t = static_cast<int>(jobs);
    return t;
}

} // namespace detail

/// Runs fn(i) for i in [0, jobs) on up to `threads` workers. fn must only
/// write to its own index's slot.
template <class Fn>
inline void parallel_for_index(std::size_t jobs, int threads, Fn&& fn) {
    if (jobs == 0) return;
    const int nthreads = detail::resolve_threads(threads, jobs);
    if (nthreads == 1) {
        for (std::size_t i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    const std::size_t chunk = (jobs + nthreads - 1) / nthreads;
    for (int w = 0; w < nthreads; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(jobs, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

/// Per-replica gyration tensors, in replica order.
inline std::vector<GyrationTensor> run_replica_tensors(const RunConfig& cfg) {
    std::vector<GyrationTensor> tensors(cfg.replicas);
    parallel_for_index(cfg.replicas, cfg.threads, [&](std::size_t i) {
        const RngStream stream{cfg.master_seed, cfg.stream_offset + i};
        tensors[i] = gyration_tensor(sample_memory_set(cfg.kernel, cfg.c, stream, cfg.sampler));
    });
    return tensors;
}

inline AsphericityEstimate estimate_asphericity(const RunConfig& cfg,
                                                StdErrorMethod method = StdErrorMethod::delta) {
    const std::vector<GyrationTensor> tensors = run_replica_tensors(cfg);
    return asphericity_estimate(tensors, method);
}

/// Memory sets for each replica, in replica order.
inline std::vector<MemorySet> run_replica_sets(const RunConfig& cfg) {
    std::vector<MemorySet> sets(cfg.replicas);
    parallel_for_index(cfg.replicas, cfg.threads, [&](std::size_t i) {
        const RngStream stream{cfg.master_seed, cfg.stream_offset + i};
        sets[i] = sample_memory_set(cfg.kernel, cfg.c, stream, cfg.sampler);
    });
    return sets;
}

} // namespace memwalk
