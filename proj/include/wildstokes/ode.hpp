#pragma once

// ode.hpp
// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) over complex matrix
// states. Error control is column-relative: each column of the state is a
// solution vector of a linear system and columns can differ in magnitude by
// many orders, so the local error of a column is measured against that
// column's own norm.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>

#include "wildstokes/common.hpp"

namespace wildstokes::ode {

using State = Eigen::MatrixXcd;
using Rhs = std::function<State(double, const State&)>;

struct Options {
  double rel_tol = kOdeRelTolDefault;
  double abs_floor = 1e-300;  // guards empty columns
  double max_step = 0.1;      // in the integration parameter
  double initial_step = 1e-3;
  long max_steps = 2000000;
};

struct Stats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
};

namespace detail {
// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
} // namespace detail

/// Integrate y' = f(t, y) from t0 to t1 (t1 > t0). Optional per-step callback
/// receives (t, y) after each accepted step and may throw to abort.
inline State integrate(const Rhs& f, State y, double t0, double t1, const Options& opt,
                       Stats* stats = nullptr,
                       const std::function<void(double, const State&)>& on_step = {}) {
  using namespace detail;
  if (t1 <= t0) {
    if (t1 == t0) return y;
    throw error("ode::integrate expects t1 >= t0");
  }
  const int rows = static_cast<int>(y.rows());
  const int cols = static_cast<int>(y.cols());

  double t = t0;
  double h = std::min(opt.initial_step, std::min(opt.max_step, t1 - t0));
  State k1 = f(t, y);
  long evals = 1;
  long accepted = 0, rejected = 0;

  State k2, k3, k4, k5, k6, k7, ynew, yerr;
  while (t < t1) {
    if (accepted + rejected > opt.max_steps)
      throw precision_error("ode::integrate exceeded the step budget");
    h = std::min(h, t1 - t);
    if (!(h > 0) || t + h == t)
      throw precision_error("ode::integrate step size underflow");

    k2 = f(t + c2 * h, y + h * (a21 * k1));
    k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = f(t + h, ynew);
    evals += 6;
    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    // column-relative error measure
    double err = 0.0;
    for (int j = 0; j < cols; ++j) {
      double scale = opt.abs_floor;
      for (int i = 0; i < rows; ++i)
        scale = std::max({scale, std::abs(y(i, j)), std::abs(ynew(i, j))});
      double colerr = 0.0;
      for (int i = 0; i < rows; ++i) colerr = std::max(colerr, std::abs(yerr(i, j)));
      err = std::max(err, colerr / (opt.rel_tol * scale));
    }

    if (err <= 1.0) {
      t += h;
      y.swap(ynew);
      k1.swap(k7); // FSAL
      ++accepted;
      if (on_step) on_step(t, y);
    } else {
      ++rejected; // k1 still belongs to (t, y)
    }
    double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h *= std::clamp(factor, 0.2, 5.0);
    h = std::min(h, opt.max_step);
  }
  if (stats) {
    stats->accepted += accepted;
    stats->rejected += rejected;
    stats->rhs_evaluations += evals;
  }
  return y;
}

} // namespace wildstokes::ode
