#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace sps {

// Serial loops are the reference implementation; every OpenMP kernel must
// reproduce its serial counterpart exactly.
enum class Execution { serial, parallel };

// Calls body(i) for i in [0, n). Under Execution::parallel iterations run on
// OpenMP threads; the first exception by index is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int max_threads() noexcept;

}  // namespace sps
