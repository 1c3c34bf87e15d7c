#pragma once

// C-SVC dual solver: min 1/2 a'Qa - e'a, 0 <= a_i <= C, y'a = 0, with Q_ij = y_i y_j K_ij.
// Working-set selection uses second-order information; inactive bounded variables are
// shrunk away periodically and their gradients rebuilt before the final optimality check.
//
// The state is kept as yg_t = y_t * grad_t so that every sweep over the active set is
// sign-free and branch-free: only unsigned kernel rows are ever read.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "eeg4/svm.hpp"

namespace eeg4::detail {

/// Row access into a precomputed symmetric kernel matrix: row(g)[h] = K(g, h).
template <class Scalar>
struct GramRows {
  const Scalar* data = nullptr;
  std::size_t stride = 0;
  const Scalar* row(std::size_t g) const { return data + g * stride; }
};

template <class Scalar>
class SmoSolver {
 public:
  // `global[i]` maps solver variable i to its row/column in the Gram matrix.
  SmoSolver(GramRows<Scalar> gram, std::span<const std::uint32_t> global, std::span<const int> y,
            const SmoOptions& options)
      : gram_(gram), l_(y.size()), C_(options.C), eps_(options.tol), shrinking_(options.shrinking) {
    max_iter_ = options.max_iterations > 0 ? options.max_iterations : std::max<std::size_t>(10000000, 100 * l_);
    gidx_.assign(global.begin(), global.end());
    y_.resize(l_);
    position_.resize(l_);
    qd_.resize(l_);
    yg_.resize(l_);
    for (std::size_t i = 0; i < l_; ++i) {
      y_[i] = y[i] > 0 ? 1.0 : -1.0;
      position_[i] = static_cast<std::uint32_t>(i);
      qd_[i] = static_cast<double>(gram_.row(gidx_[i])[gidx_[i]]);
      yg_[i] = -y_[i];
    }
    alpha_.assign(l_, 0.0);
    ygbar_.assign(l_, 0.0);
    ki_.resize(l_);
    kj_.resize(l_);
    full_.resize(l_);
  }

  /// Starts from a feasible point (0 <= a <= C, y'a = 0) whose scaled gradients the caller
  /// already has: yg_t = y_t * grad_t and ygbar_t = y_t * C * sum_{a_i = C} Q_ti.
  void warm_start(std::span<const double> alpha, std::span<const double> yg, std::span<const double> ygbar) {
    for (std::size_t i = 0; i < l_; ++i) {
      alpha_[i] = std::clamp(alpha[i], 0.0, C_);
      yg_[i] = yg[i];
      ygbar_[i] = ygbar[i];
    }
  }

  SmoResult solve() {
    active_ = l_;
    std::size_t iter = 0;
    std::size_t counter = std::min<std::size_t>(l_, 1000) + 1;
    bool converged = false;
    while (iter < max_iter_) {
      if (--counter == 0) {
        counter = std::min<std::size_t>(l_, 1000);
        if (shrinking_) shrink();
      }
      std::size_t i = 0, j = 0;
      if (select_working_set(i, j)) {
        reconstruct_gradient();
        active_ = l_;
        if (select_working_set(i, j)) {
          converged = true;
          break;
        }
        counter = 1;
      }
      ++iter;
      take_step(i, j);
    }
    if (!converged && active_ < l_) {
      reconstruct_gradient();
      active_ = l_;
    }

    SmoResult out;
    out.iterations = iter;
    out.converged = converged;
    out.bias = -rho();
    out.alphas.assign(l_, 0.0);
    for (std::size_t i = 0; i < l_; ++i) out.alphas[position_[i]] = alpha_[i];
    return out;
  }

 private:
  static constexpr double kTau = 1e-12;
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  bool is_upper(std::size_t t) const { return alpha_[t] >= C_; }
  bool is_lower(std::size_t t) const { return alpha_[t] <= 0; }
  bool is_free(std::size_t t) const { return alpha_[t] > 0 && alpha_[t] < C_; }
  // Variables that may move up / down along y (the I_up / I_low index sets).
  bool up_ok(std::size_t t) const { return y_[t] > 0 ? alpha_[t] < C_ : alpha_[t] > 0; }
  bool low_ok(std::size_t t) const { return y_[t] > 0 ? alpha_[t] > 0 : alpha_[t] < C_; }

  // Unsigned kernel row of variable i over the first `len` variables.
  void load_row(std::size_t i, std::size_t len, double* out) const {
    const Scalar* row = gram_.row(gidx_[i]);
    const std::uint32_t* g = gidx_.data();
#pragma omp simd
    for (std::size_t k = 0; k < len; ++k) out[k] = static_cast<double>(row[g[k]]);
  }

  void swap_index(std::size_t a, std::size_t b) {
    std::swap(gidx_[a], gidx_[b]);
    std::swap(position_[a], position_[b]);
    std::swap(y_[a], y_[b]);
    std::swap(qd_[a], qd_[b]);
    std::swap(alpha_[a], alpha_[b]);
    std::swap(yg_[a], yg_[b]);
    std::swap(ygbar_[a], ygbar_[b]);
  }

  // Returns true when the pair-gap is below eps (optimal on the active set). On false,
  // ki_ holds the kernel row of out_i.
  bool select_working_set(std::size_t& out_i, std::size_t& out_j) {
    const std::size_t n = active_;
    const double* y = y_.data();
    const double* a = alpha_.data();
    const double* yg = yg_.data();
    const double c = C_;

    // Values are staged in buffers so that the reductions vectorize and the index
    // search afterwards is a single predictable scan (last index wins ties).
    double* stage = kj_.data();
    double gmax = -kInf;
#pragma omp simd reduction(max : gmax)
    for (std::size_t t = 0; t < n; ++t) {
      const bool ok = y[t] > 0 ? a[t] < c : a[t] > 0;
      const double v = ok ? -yg[t] : -kInf;
      stage[t] = v;
      gmax = std::max(gmax, v);
    }
    if (gmax == -kInf) return true;
    std::size_t i = n;
    while (i-- > 0) {
      if (stage[i] == gmax) break;
    }

    load_row(i, n, ki_.data());
    const double* ki = ki_.data();
    const double* qd = qd_.data();
    const double qdi = qd_[i];
    double gmax2 = -kInf;
    double obj_min = kInf;
#pragma omp simd reduction(max : gmax2) reduction(min : obj_min)
    for (std::size_t t = 0; t < n; ++t) {
      const bool ok = y[t] > 0 ? a[t] > 0 : a[t] < c;
      gmax2 = std::max(gmax2, ok ? yg[t] : -kInf);
      const double gd = gmax + yg[t];
      double quad = qdi + qd[t] - 2.0 * ki[t];
      quad = quad > 0 ? quad : kTau;
      const double obj = ok && gd > 0 ? -(gd * gd) / quad : kInf;
      stage[t] = obj;
      obj_min = std::min(obj_min, obj);
    }
    std::size_t j = n;
    while (j-- > 0) {
      if (stage[j] == obj_min) break;
    }
    if (gmax + gmax2 < eps_ || obj_min == kInf) return true;
    out_i = i;
    out_j = j;
    return false;
  }

  void take_step(std::size_t i, std::size_t j) {
    load_row(j, active_, kj_.data());
    const double old_ai = alpha_[i], old_aj = alpha_[j];
    const double gi = y_[i] * yg_[i], gj = y_[j] * yg_[j];
    double quad = qd_[i] + qd_[j] - 2.0 * ki_[j];
    if (quad <= 0) quad = kTau;
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    if (y_[i] != y_[j]) {
      const double delta = (-gi - gj) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) {
          aj = 0;
          ai = diff;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = -diff;
      }
      if (diff > 0) {
        if (ai > C_) {
          ai = C_;
          aj = C_ - diff;
        }
      } else if (aj > C_) {
        aj = C_;
        ai = C_ + diff;
      }
    } else {
      const double delta = (gi - gj) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C_) {
        if (ai > C_) {
          ai = C_;
          aj = sum - C_;
        }
      } else if (aj < 0) {
        aj = 0;
        ai = sum;
      }
      if (sum > C_) {
        if (aj > C_) {
          aj = C_;
          ai = sum - C_;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = sum;
      }
    }

    const double si = y_[i] * (ai - old_ai), sj = y_[j] * (aj - old_aj);
    const double* ki = ki_.data();
    const double* kj = kj_.data();
    double* yg = yg_.data();
    for (std::size_t k = 0; k < active_; ++k) yg[k] += si * ki[k] + sj * kj[k];

    const bool ui = old_ai >= C_, uj = old_aj >= C_;
    if (ui != is_upper(i)) update_bar(i, ui ? -C_ : C_);
    if (uj != is_upper(j)) update_bar(j, uj ? -C_ : C_);
  }

  void update_bar(std::size_t i, double c) {
    load_row(i, l_, full_.data());
    const double s = c * y_[i];
    const double* row = full_.data();
    double* bar = ygbar_.data();
    for (std::size_t k = 0; k < l_; ++k) bar[k] += s * row[k];
  }

  bool be_shrunk(std::size_t t, double gmax1, double gmax2) const {
    if (is_free(t)) return false;
    if (!up_ok(t)) return -yg_[t] > gmax1;
    return yg_[t] > gmax2;
  }

  void shrink() {
    double gmax1 = -kInf, gmax2 = -kInf;
    for (std::size_t t = 0; t < active_; ++t) {
      if (up_ok(t)) gmax1 = std::max(gmax1, -yg_[t]);
      if (low_ok(t)) gmax2 = std::max(gmax2, yg_[t]);
    }
    if (!unshrunk_ && gmax1 + gmax2 <= eps_ * 10) {
      unshrunk_ = true;
      reconstruct_gradient();
      active_ = l_;
    }
    for (std::size_t t = 0; t < active_; ++t) {
      if (!be_shrunk(t, gmax1, gmax2)) continue;
      --active_;
      while (active_ > t) {
        if (!be_shrunk(active_, gmax1, gmax2)) {
          swap_index(t, active_);
          break;
        }
        --active_;
      }
    }
  }

  void reconstruct_gradient() {
    if (active_ == l_) return;
    for (std::size_t j = active_; j < l_; ++j) yg_[j] = ygbar_[j] - y_[j];
    std::size_t nr_free = 0;
    for (std::size_t j = 0; j < active_; ++j) nr_free += is_free(j);
    double* row = full_.data();
    if (nr_free * l_ > 2 * active_ * (l_ - active_)) {
      for (std::size_t i = active_; i < l_; ++i) {
        load_row(i, active_, row);
        double acc = 0.0;
        for (std::size_t j = 0; j < active_; ++j) {
          if (is_free(j)) acc += alpha_[j] * y_[j] * row[j];
        }
        yg_[i] += acc;
      }
    } else {
      for (std::size_t i = 0; i < active_; ++i) {
        if (!is_free(i)) continue;
        load_row(i, l_, row);
        const double s = alpha_[i] * y_[i];
        for (std::size_t j = active_; j < l_; ++j) yg_[j] += s * row[j];
      }
    }
  }

  double rho() const {
    std::size_t nr_free = 0;
    double ub = kInf, lb = -kInf, sum_free = 0.0;
    for (std::size_t i = 0; i < active_; ++i) {
      const double yg = yg_[i];
      if (is_upper(i)) {
        if (y_[i] < 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else if (is_lower(i)) {
        if (y_[i] > 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else {
        ++nr_free;
        sum_free += yg;
      }
    }
    if (nr_free > 0) return sum_free / static_cast<double>(nr_free);
    return (ub + lb) / 2.0;
  }

  GramRows<Scalar> gram_;
  std::size_t l_;
  double C_;
  double eps_;
  bool shrinking_;
  bool unshrunk_ = false;
  std::size_t max_iter_ = 0;
  std::size_t active_ = 0;
  std::vector<std::uint32_t> gidx_;
  std::vector<std::uint32_t> position_;  // original variable index
  std::vector<double> y_, qd_, alpha_, yg_, ygbar_;
  std::vector<double> ki_, kj_, full_;
};

}  // namespace eeg4::detail
