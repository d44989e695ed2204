// Copyright 2026 The labelfuse Authors.
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

#ifndef LABELFUSE_PARALLEL_H_
#define LABELFUSE_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace labelfuse {

// Runs fn(i) for i in [0, n) on up to `threads` workers pulling indices from
// a shared counter. If calls throw, the exception of the smallest index is
// rethrown after all workers finish.
template <typename Fn>
void ParallelFor(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Splits [0, n) into one contiguous chunk per worker, folds each chunk into
// its own accumulator made by `make`, then merges the accumulators in chunk
// order. The merge must be associative for the result to be independent of
// the thread count.
template <typename Acc, typename Make, typename Fold, typename MergeFn>
Acc ParallelReduce(std::size_t n, int threads, Make&& make, Fold&& fold,
                   MergeFn&& merge) {
  const std::size_t chunks = std::max<std::size_t>(
      1, std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1))));
  std::vector<Acc> partial;
  partial.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) partial.push_back(make());
  ParallelFor(chunks, threads, [&](std::size_t c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    for (std::size_t i = begin; i < end; ++i) fold(partial[c], i);
  });
  for (std::size_t c = 1; c < chunks; ++c) merge(partial[0], partial[c]);
  return std::move(partial[0]);
}

}  // namespace labelfuse

#endif  // LABELFUSE_PARALLEL_H_
