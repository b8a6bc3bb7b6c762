#pragma once

// Reference values computed independently of the library code under test.

#include <array>
#include <cmath>

namespace oracle {

// Trace of the Mathieu monodromy by classical RK4 at n and 2n steps, combined
// by Richardson extrapolation (error ~ h^4).
inline double mathieu_trace(double a, double q, int n = 20000) {
  auto run = [&](int steps) {
    const double pi = std::acos(-1.0), h = pi / steps;
    auto f = [&](double t, const std::array<double, 4>& y) {
      const double w = a + 2.0 * q * std::cos(2.0 * t);
      return std::array<double, 4>{y[1], -w * y[0], y[3], -w * y[2]};
    };
    std::array<double, 4> y{1.0, 0.0, 0.0, 1.0};
    for (int i = 0; i < steps; ++i) {
      const double t = i * h;
      auto add = [](const std::array<double, 4>& u, const std::array<double, 4>& v, double s) {
        return std::array<double, 4>{u[0] + s * v[0], u[1] + s * v[1], u[2] + s * v[2], u[3] + s * v[3]};
      };
      const auto k1 = f(t, y);
      const auto k2 = f(t + h / 2, add(y, k1, h / 2));
      const auto k3 = f(t + h / 2, add(y, k2, h / 2));
      const auto k4 = f(t + h, add(y, k3, h));
      for (int k = 0; k < 4; ++k) y[k] += h / 6.0 * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]);
    }
    return y[0] + y[3];
  };
  const double t1 = run(n), t2 = run(2 * n);
  return t2 + (t2 - t1) / 15.0;
}

// Power series of the Mathieu characteristic values (valid for small q).
inline double a0_series(double q) {
  const double q2 = q * q;
  return -q2 / 2 + 7 * q2 * q2 / 128 - 29 * q2 * q2 * q2 / 2304 + 68687 * std::pow(q, 8) / 18874368;
}
inline double b1_series(double q) {
  return 1 - q - q * q / 8 + q * q * q / 64 - std::pow(q, 4) / 1536 - 11 * std::pow(q, 5) / 36864;
}

inline constexpr double kCoulomb = 8.9875517923e9;
inline constexpr double kE = 1.602176634e-19;
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kHbar = 1.054571817e-34;
inline const double kTwoPi = 2.0 * std::acos(-1.0);

}  // namespace oracle
