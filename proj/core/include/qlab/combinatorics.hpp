#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qlab {

/// Binomial coefficient as a double; 0 outside the valid range. Exact for the
/// desk-scale arguments used here (well below 2^53).
inline double binom(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / i;
  // Round to the nearest integer; the product is exact in double for n <= 60.
  return static_cast<double>(static_cast<std::uint64_t>(r + 0.5));
}

inline double factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

/// All size-k subsets of {0,...,n-1} in lexicographic order.
inline std::vector<std::vector<int>> subsets_of_size(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  if (k == 0) out.assign(1, {});
  return out;
}

/// All size-k multisets over {0,...,n-1}, each sorted ascending.
inline std::vector<std::vector<int>> multisets_of_size(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || n < 1) return out;
  std::vector<int> cur(k, 0);
  if (k == 0) {
    out.assign(1, {});
    return out;
  }
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - 1) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[i];
  }
  return out;
}

/// Number of arrangements of a sorted multiset: k! / prod(mult!).
inline double arrangement_count(const std::vector<int>& sorted_multiset) {
  double r = factorial(static_cast<int>(sorted_multiset.size()));
  std::size_t i = 0;
  while (i < sorted_multiset.size()) {
    std::size_t j = i;
    while (j < sorted_multiset.size() && sorted_multiset[j] == sorted_multiset[i]) ++j;
    r /= factorial(static_cast<int>(j - i));
    i = j;
  }
  return r;
}

}  // namespace qlab
