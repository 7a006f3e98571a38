#pragma once

// Work distribution for the batch-level loops (schedule entries, identity
// trials, probe cells). Results are always written into preallocated slots
// indexed by the loop counter, so output order never depends on scheduling.

#include <cstddef>
#include <functional>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

namespace trotterkit {

enum class Execution { serial, parallel };

/// Number of worker threads the parallel kernels may use. Honors the
/// TROTTERKIT_THREADS environment variable as an upper cap.
int worker_count();

/// Applies TROTTERKIT_THREADS to the OpenMP runtime. Idempotent.
void configure_threads_from_env();

/// Runs body(i) for i in [0, count). Exceptions thrown by any iteration are
/// rethrown on the calling thread (the first one by index wins).
void for_each_index(std::size_t count, Execution exec,
                    const std::function<void(std::size_t)>& body);

template <class Fn>
auto map_indices(std::size_t count, Execution exec, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using R = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<std::optional<R>> slots(count);
  for_each_index(count, exec, [&](std::size_t i) { slots[i].emplace(fn(i)); });
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace trotterkit
