#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace horolab::detail {

inline constexpr std::size_t kChunk = 2048;

/// Per-chunk partial sums of `width` accumulators, combined in chunk order so
/// the result does not depend on the thread count. body(i, acc) adds item i.
template <class Body>
std::vector<double> chunked_sums(std::size_t n, std::size_t width, Body body) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks * width, 0.0);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t c = 0; c < chunks; ++c) {
    double* acc = partial.data() + c * width;
    const std::size_t hi = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < hi; ++i) body(i, acc);
  }
  std::vector<double> total(width, 0.0);
  for (std::size_t c = 0; c < chunks; ++c)
    for (std::size_t k = 0; k < width; ++k) total[k] += partial[c * width + k];
  return total;
}

}  // namespace horolab::detail
