#pragma once

#include <cstddef>
#include <vector>

namespace bntune {

/// Calls `visit` with every size-k subset of `items` in lexicographic index
/// order until it returns true. Returns whether some call returned true.
template <typename Visit>
bool for_each_subset(const std::vector<std::size_t>& items, std::size_t k, Visit&& visit) {
  if (k > items.size()) return false;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<std::size_t> subset(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) subset[i] = items[idx[i]];
    if (visit(subset)) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == items.size() - k + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace bntune
