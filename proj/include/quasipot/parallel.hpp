#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace quasipot {

/// Thread count from an explicit request, else QUASIPOT_THREADS, else 1.
inline unsigned resolve_threads(std::optional<unsigned> requested = std::nullopt) {
  if (requested && *requested > 0) return *requested;
  if (const char* env = std::getenv("QUASIPOT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(std::min<long>(v, 256));
  }
  return 1;
}

// Runs body(begin, end, chunk) over `chunks` contiguous slices of [0, count).
// Chunk boundaries depend only on `count` and `chunks`, so per-chunk results
// combined in chunk order are independent of scheduling. The first exception
// thrown by any chunk is rethrown on the caller's thread.
template <class Body>
void parallel_chunks(std::size_t count, unsigned chunks, Body body) {
  chunks = std::max(1u, std::min<unsigned>(chunks, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  auto slice = [&](unsigned c) {
    const std::size_t begin = count * c / chunks;
    const std::size_t end = count * (c + 1) / chunks;
    body(begin, end, c);
  };
  if (chunks == 1) {
    slice(0);
    return;
  }
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (unsigned c = 0; c < chunks; ++c) {
    pool.emplace_back([&, c] {
      try {
        slice(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace quasipot
