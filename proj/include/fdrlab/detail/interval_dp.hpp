#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace fdrlab::detail {

struct DpInterval {
  double lo, hi, weight;
  std::size_t key;
};

/// Maximum-weight selection of pairwise disjoint intervals. Relabels by
/// nondecreasing upper endpoint and runs S_j = max{S_{i(j)} + w_j, S_{j-1}}
/// with i(j) = max{s : hi_s < lo_j}, backtracking select/previous arrays;
/// ties break toward not selecting j. Returns the chosen keys, ascending.
inline std::vector<std::size_t> max_weight_disjoint(std::vector<DpInterval> items) {
  std::sort(items.begin(), items.end(), [](const DpInterval& a, const DpInterval& b) {
    if (a.hi != b.hi) return a.hi < b.hi;
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.key < b.key;
  });
  const std::size_t k = items.size();
  std::vector<double> his(k);
  for (std::size_t i = 0; i < k; ++i) his[i] = items[i].hi;
  std::vector<double> score(k + 1, 0.0);
  std::vector<std::size_t> prev(k + 1, 0);
  std::vector<char> take(k + 1, 0);
  for (std::size_t j = 1; j <= k; ++j) {
    std::size_t ij = static_cast<std::size_t>(
        std::lower_bound(his.begin(), his.begin() + (j - 1), items[j - 1].lo) - his.begin());
    if (score[ij] + items[j - 1].weight > score[j - 1]) {
      take[j] = 1;
      prev[j] = ij;
      score[j] = score[ij] + items[j - 1].weight;
    } else {
      take[j] = 0;
      prev[j] = j - 1;
      score[j] = score[j - 1];
    }
  }
  std::vector<std::size_t> selected;
  for (std::size_t s = k; s > 0;) {
    if (take[s]) {
      selected.push_back(items[s - 1].key);
      s = prev[s];
    } else {
      --s;
    }
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

}  // namespace fdrlab::detail
