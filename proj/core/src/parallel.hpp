#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace lapsparse::detail {

/// Calls fn(worker) for worker in [0, workers) on separate threads and
/// rethrows the first exception (by worker index).
template <typename Fn>
void run_workers(unsigned workers, Fn&& fn) {
  if (workers <= 1) {
    fn(0u);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          fn(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Number of items assigned to `worker` when `total` items are split evenly.
constexpr std::uint64_t share(std::uint64_t total, unsigned workers, unsigned worker) noexcept {
  return total / workers + (worker < total % workers ? 1 : 0);
}

}  // namespace lapsparse::detail
