#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

#include "eeg4/types.hpp"

namespace oracle {

// For every snapshot and channel, walk outwards while the value stays bit-equal and flag the
// snapshot when the enclosing run is long enough.
inline std::vector<std::size_t> flatline_indices(const eeg4::TaskRecord& task, double seconds, double rate) {
  const std::size_t n = task.snapshots.size();
  std::size_t min_len = 1;
  while (static_cast<double>(min_len) < seconds * rate - 1e-9) ++min_len;
  std::set<std::size_t> flagged;
  for (std::size_t c = 0; c < eeg4::kFeatureCount; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = task.snapshots[i].values[c];
      std::size_t lo = i, hi = i;
      while (lo > 0 && task.snapshots[lo - 1].values[c] == v) --lo;
      while (hi + 1 < n && task.snapshots[hi + 1].values[c] == v) ++hi;
      if (hi - lo + 1 >= min_len) flagged.insert(i);
    }
  }
  return {flagged.begin(), flagged.end()};
}

}  // namespace oracle
