#pragma once

#include <cstdint>
#include <exception>
#include <type_traits>
#include <vector>

#include <omp.h>

#include "grabforest/random.hpp"

namespace grabforest {

struct RunOptions {
  std::uint64_t seed = 0;
  int threads = 0;  // 0: OpenMP default, 1: serial
};

// Replica r of a configuration draws from Rng(seed, stream_base + r).
// Results land at index r, so the output does not depend on scheduling.
template <class Fn>
auto run_replicas(std::size_t reps, const RunOptions& opts, std::uint64_t stream_base, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, Rng&, std::size_t>> {
  using Result = std::invoke_result_t<Fn&, Rng&, std::size_t>;
  std::vector<Result> results(reps);
  std::exception_ptr failure;
  std::size_t failed_rep = reps;
  const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();
  const auto count = static_cast<std::int64_t>(reps);

#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
  for (std::int64_t r = 0; r < count; ++r) {
    try {
      Rng rng(opts.seed, stream_base + static_cast<std::uint64_t>(r));
      results[static_cast<std::size_t>(r)] = fn(rng, static_cast<std::size_t>(r));
    } catch (...) {
#pragma omp critical(grabforest_replica_failure)
      {
        // Keep the lowest failing replica so the error is reproducible.
        if (static_cast<std::size_t>(r) < failed_rep) {
          failed_rep = static_cast<std::size_t>(r);
          failure = std::current_exception();
        }
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

// Sequential reference for run_replicas; identical output by construction.
template <class Fn>
auto run_replicas_serial(std::size_t reps, const RunOptions& opts, std::uint64_t stream_base,
                         Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, Rng&, std::size_t>> {
  std::vector<std::invoke_result_t<Fn&, Rng&, std::size_t>> results;
  results.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng(opts.seed, stream_base + r);
    results.push_back(fn(rng, r));
  }
  return results;
}

// Stream bases keep configurations of one experiment disjoint.
inline std::uint64_t stream_base(std::uint64_t configuration) { return configuration << 40; }

}  // namespace grabforest
