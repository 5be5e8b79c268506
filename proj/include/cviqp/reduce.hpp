#pragma once

// Deterministic parallel reduction. Work is cut into fixed 4096-element
// blocks; each block is summed by recursive midpoint halving and block sums
// are combined by the same halving over block index. The tree shape depends
// only on the element count, so results are bitwise identical for any worker
// count, and the serial path walks the identical tree.

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace cviqp {

// Worker cap for parallel loops; 0 means hardware concurrency.
int max_threads();
void set_max_threads(int n);
int effective_threads(std::int64_t work_items);

namespace detail {

constexpr std::int64_t kReduceBlock = 4096;
constexpr std::int64_t kReduceLeaf = 16;

template <typename T, typename F>
T pairwise_range(std::int64_t lo, std::int64_t hi, const F& f) {
  if (hi - lo <= kReduceLeaf) {
    T acc{};
    for (std::int64_t i = lo; i < hi; ++i) acc = acc + f(i);
    return acc;
  }
  const std::int64_t mid = lo + (hi - lo) / 2;
  return pairwise_range<T>(lo, mid, f) + pairwise_range<T>(mid, hi, f);
}

template <typename T>
T combine_tree(std::vector<T>& v) {
  std::int64_t count = static_cast<std::int64_t>(v.size());
  while (count > 1) {
    const std::int64_t half = count / 2;
    for (std::int64_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
    if (count % 2 == 1) {
      v[half] = v[count - 1];
      count = half + 1;
    } else {
      count = half;
    }
  }
  return v.empty() ? T{} : v[0];
}

}  // namespace detail

namespace detail {
// Set while executing inside a parallel_for worker so nested reductions run
// serially instead of oversubscribing; the tree shape (and thus the result)
// is unaffected.
inline thread_local bool tl_inside_worker = false;
}  // namespace detail

// Runs f(i) for i in [0, count) across workers; f must only touch state
// indexed by i.
template <typename F>
void parallel_for(std::int64_t count, const F& f) {
  const int workers = detail::tl_inside_worker ? 1 : effective_threads(count);
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto run = [&]() {
    detail::tl_inside_worker = true;
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      f(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  detail::tl_inside_worker = false;
  for (auto& t : pool) t.join();
}

// Sum of f(i) over [0, count) with the fixed-shape tree described above.
// T needs value-initialization to zero and operator+.
template <typename T, typename F>
T pairwise_sum(std::int64_t count, const F& f) {
  if (count <= 0) return T{};
  const std::int64_t blocks = (count + detail::kReduceBlock - 1) / detail::kReduceBlock;
  std::vector<T> partial(static_cast<std::size_t>(blocks));
  parallel_for(blocks, [&](std::int64_t b) {
    const std::int64_t lo = b * detail::kReduceBlock;
    const std::int64_t hi = std::min(count, lo + detail::kReduceBlock);
    partial[static_cast<std::size_t>(b)] = detail::pairwise_range<T>(lo, hi, f);
  });
  return detail::combine_tree(partial);
}

// Same tree, walked on the calling thread (bitwise-identical result); for
// use inside loops that are already parallel at an outer level.
template <typename T, typename F>
T pairwise_sum_serial(std::int64_t count, const F& f) {
  if (count <= 0) return T{};
  const std::int64_t blocks = (count + detail::kReduceBlock - 1) / detail::kReduceBlock;
  std::vector<T> partial(static_cast<std::size_t>(blocks));
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::int64_t lo = b * detail::kReduceBlock;
    const std::int64_t hi = std::min(count, lo + detail::kReduceBlock);
    partial[static_cast<std::size_t>(b)] = detail::pairwise_range<T>(lo, hi, f);
  }
  return detail::combine_tree(partial);
}

}  // namespace cviqp
