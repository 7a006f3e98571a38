#include "trotterkit/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

#ifdef TROTTERKIT_HAVE_OPENMP
#include <omp.h>
#endif

namespace trotterkit {

namespace {

int env_thread_cap() {
  const char* raw = std::getenv("TROTTERKIT_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  try {
    const int v = std::stoi(raw);
    return v > 0 ? v : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

int worker_count() {
#ifdef TROTTERKIT_HAVE_OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  const int cap = env_thread_cap();
  if (cap > 0 && cap < n) n = cap;
  return n;
}

void configure_threads_from_env() {
#ifdef TROTTERKIT_HAVE_OPENMP
  static std::once_flag once;
  std::call_once(once, [] {
    const int cap = env_thread_cap();
    if (cap > 0) omp_set_num_threads(cap);
  });
#endif
}

void for_each_index(std::size_t count, Execution exec,
                    const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
#ifdef TROTTERKIT_HAVE_OPENMP
  if (exec == Execution::parallel && count > 1 && worker_count() > 1) {
    std::vector<std::exception_ptr> errors(count);
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
    for (long long i = 0; i < n; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    return;
  }
#else
  (void)exec;
#endif
  for (std::size_t i = 0; i < count; ++i) body(i);
}

}  // namespace trotterkit
