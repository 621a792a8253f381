// Copyright 2026 The geoctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GEOCTL_PARALLEL_H_
#define GEOCTL_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace geoctl {

// Splits [0, n) into fixed-size chunks and runs `fn(chunk_index, begin, end)`
// on up to `threads` workers. Chunk boundaries depend only on n and
// chunk_size, so callers that store per-chunk partials and reduce them in
// chunk order get results independent of the thread count.
template <typename Fn>
void ParallelChunks(std::int64_t n, std::int64_t chunk_size, int threads,
                    Fn&& fn) {
  if (n <= 0) return;
  chunk_size = std::max<std::int64_t>(1, chunk_size);
  const std::int64_t chunks = (n + chunk_size - 1) / chunk_size;
  const int workers =
      static_cast<int>(std::clamp<std::int64_t>(threads, 1, chunks));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

inline std::int64_t ChunkCount(std::int64_t n, std::int64_t chunk_size) {
  return n <= 0 ? 0 : (n + chunk_size - 1) / chunk_size;
}

}  // namespace geoctl

#endif  // GEOCTL_PARALLEL_H_
