#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace flagflow::detail {

/// Dormand-Prince 5(4) embedded pair with FSAL and a standard step-size
/// controller. Works on fixed-size Eigen column vectors of dimension N.
template <int N>
class Dopri5 {
public:
  using State = Eigen::Matrix<double, N, 1>;

  struct Tolerances {
    double rel = 1e-9;
    double abs = 1e-12;
    double min_step = 1e-14;
    double max_step = 1.0;
  };

  enum class Status { accepted, collapsed };

  explicit Dopri5(Tolerances tol) : tol_(tol) {}

  void set_max_step(double h) { tol_.max_step = std::max(h, 2.0 * tol_.min_step); }

  /// Advances (t, y, fy) by one accepted step of size at most
  /// min(h, t_limit - t, max_step). On return h holds the proposal for the
  /// next step. The previous endpoint is kept for dense output.
  template <class Rhs>
  Status step(const Rhs& rhs, double& t, State& y, State& fy, double& h, double t_limit) {
    h = std::min(h, tol_.max_step);
    while (true) {
      const double remaining = t_limit - t;
      const bool final_step = h >= remaining;
      const double h_try = final_step ? remaining : h;

      State y_new, f_new;
      const double err = attempt(rhs, y, fy, h_try, y_new, f_new);

      if (std::isfinite(err) && err <= 1.0) {
        y_prev_ = y;
        f_prev_ = fy;
        t_prev_ = t;
        h_last_ = h_try;
        t = final_step ? t_limit : t + h_try;
        y = y_end_ = y_new;
        fy = f_end_ = f_new;
        const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        // A clipped final step says nothing about the natural step size.
        h = std::min(final_step ? std::max(h, h_try * grow) : h_try * grow, tol_.max_step);
        return Status::accepted;
      }
      const double shrink = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.25;
      h = h_try * shrink;
      if (h < tol_.min_step) return Status::collapsed;
    }
  }

  /// Cubic Hermite interpolant over the last accepted step, theta in [0, 1].
  State dense(double theta) const {
    const double t2 = theta * theta, t3 = t2 * theta;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + theta;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_prev_ + h10 * h_last_ * f_prev_ + h01 * y_end_ + h11 * h_last_ * f_end_;
  }

  double last_step() const { return h_last_; }
  double last_start() const { return t_prev_; }

private:
  template <class Rhs>
  double attempt(const Rhs& rhs, const State& y, const State& k1, double h, State& y_new, State& k7) const {
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                     a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                     b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                     e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    const State k2 = rhs(State(y + h * a21 * k1));
    const State k3 = rhs(State(y + h * (a31 * k1 + a32 * k2)));
    const State k4 = rhs(State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 = rhs(State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 = rhs(State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = rhs(y_new);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    if (!y_new.allFinite() || !k7.allFinite() || !err.allFinite()) return INFINITY;

    double norm = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double scale = tol_.abs + tol_.rel * std::max(std::abs(y[i]), std::abs(y_new[i]));
      norm = std::max(norm, std::abs(err[i]) / scale);
    }
    return norm;
  }

  Tolerances tol_;
  State y_prev_ = State::Zero(), f_prev_ = State::Zero();
  State y_end_ = State::Zero(), f_end_ = State::Zero();
  double t_prev_ = 0.0, h_last_ = 0.0;
};

}  // namespace flagflow::detail
