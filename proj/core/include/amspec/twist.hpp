#pragma once

#include <span>
#include <vector>

#include "amspec/fourier_series.hpp"

namespace amspec {

/// Point (x, r) on the lifted cylinder; the phase is x mod 1.
struct CylinderState {
  double x = 0.0;
  double r = 0.0;
};

/// Finite segment of a configuration (x_n); base_index is the index of points[0].
struct Configuration {
  std::vector<double> points;
  long base_index = 0;

  std::size_t size() const { return points.size(); }
};

inline constexpr double kDiffusionGuard = 1e9;

/// (x, r) -> (x + r + f(x), r + f(x)).
CylinderState twist_step(const FourierSeries& f, CylinderState s);
/// (x, r) -> (x - r, r - f(x - r)).
CylinderState twist_step_inverse(const FourierSeries& f, CylinderState s);

/// States s_0 = s, s_1, ..., s_n. Negative n walks backwards.
/// Throws Overflow once |r| exceeds kDiffusionGuard.
std::vector<CylinderState> orbit(const FourierSeries& f, CylinderState s, long n);

/// h(x0, x1) = (x1 - x0 - a)^2 / 2 + F(x0), F the zero-mean antiderivative of f.
class GeneratingFunction {
 public:
  GeneratingFunction(const FourierSeries& f, double a);

  double operator()(double x0, double x1) const;
  const FourierSeries& force() const { return f_; }
  const FourierSeries& potential() const { return F_; }
  double drift() const { return a_; }

 private:
  FourierSeries f_;
  FourierSeries F_;
  double a_;
};

/// sum_{n=first}^{last-1} h(x_n, x_{n+1}) over the whole segment.
double segment_action(const GeneratingFunction& h, const Configuration& c);
double segment_action(const FourierSeries& f, double a, const Configuration& c);

/// A(perturbed) - A(base) for configurations that agree outside [lo, hi]
/// (indices into points); sums only the terms touching the window.
double action_difference(const GeneratingFunction& h, const Configuration& base, const Configuration& perturbed,
                         std::size_t lo, std::size_t hi);

/// x_{n+1} - 2 x_n + x_{n-1} - f(x_n) at interior indices 1..size-2.
std::vector<double> euler_lagrange_residual(const FourierSeries& f, const Configuration& c);

/// Builds the lifted configuration x_0..x_{n} of an orbit.
Configuration configuration_from_orbit(std::span<const CylinderState> states);

}  // namespace amspec
