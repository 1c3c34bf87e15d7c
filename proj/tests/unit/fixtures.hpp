#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "eeg4/types.hpp"

namespace fixtures {

// Complete session: 600 jittered snapshots per task at 10 Hz, no repeated values.
inline eeg4::Session nominal_session(int subject, int session, std::uint64_t seed, std::size_t per_task = 600,
                                     double rate = 10.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  eeg4::Session s;
  s.subject_id = subject;
  s.session_index = session;
  s.sample_rate = rate;
  const double duration = static_cast<double>(per_task) / rate;
  for (std::size_t k = 0; k < eeg4::kTaskCount; ++k) {
    auto& t = s.tasks[k];
    t.task = eeg4::kProtocolOrder[k];
    t.start = duration * static_cast<double>(k);
    t.nominal_duration = duration;
    for (std::size_t i = 0; i < per_task; ++i) {
      eeg4::SpectralSnapshot snap;
      snap.timestamp = t.start + static_cast<double>(i) / rate;
      for (auto& v : snap.values) v = u(rng);
      t.snapshots.push_back(snap);
    }
  }
  return s;
}

inline eeg4::FeatureMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  eeg4::FeatureMatrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = n(rng);
  return x;
}

// Gaussian blobs: class c centred at offset * e_(c mod cols).
inline void blobs(std::size_t per_class, std::size_t classes, std::size_t cols, double offset, std::mt19937_64& rng,
                  eeg4::FeatureMatrix& x, std::vector<int>& y) {
  x = random_matrix(per_class * classes, cols, rng);
  y.assign(per_class * classes, 0);
  for (std::size_t i = 0; i < per_class * classes; ++i) {
    const int c = static_cast<int>(i % classes);
    y[i] = c;
    x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(static_cast<std::size_t>(c) % cols)) += offset;
  }
}

}  // namespace fixtures
