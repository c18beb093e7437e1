#pragma once

#include <functional>
#include <vector>

#include "amspec/fourier_series.hpp"

namespace amspec {

inline constexpr int kDefaultModes = 256;
inline constexpr double kMaxTailRatio = 1e-6;

/// Orientation-preserving circle diffeomorphism with lift x -> x + p(x).
class CircleDiffeo {
 public:
  CircleDiffeo() = default;
  /// Throws NonInvertible unless 1 + p' > 0 on a dense grid.
  explicit CircleDiffeo(FourierSeries periodic_part);

  static CircleDiffeo identity() { return CircleDiffeo(); }
  static CircleDiffeo rotation(double alpha) { return CircleDiffeo(FourierSeries::constant(alpha)); }
  /// Lift whose derivative is 1 + sum_k (c_k cos 2 pi k x + s_k sin 2 pi k x).
  static CircleDiffeo from_derivative_harmonics(const std::vector<double>& cos_amps,
                                                const std::vector<double>& sin_amps, int n_modes = 0);

  const FourierSeries& periodic_part() const { return periodic_; }
  const std::vector<double>& grid_samples() const { return grid_; }

  double lift(double x) const { return x + periodic_.eval(x); }
  double operator()(double x) const { return lift(x); }
  double derivative(double x) const { return 1.0 + periodic_.eval_derivative(x); }
  double min_derivative() const;

  /// Solves lift(y) = x by safeguarded Newton. Throws NoConvergence on stall.
  double inverse_lift(double x, double tol = 1e-15) const;

 private:
  FourierSeries periodic_;
  std::vector<double> grid_;
};

struct DiffeoFit {
  CircleDiffeo diffeo;
  double residual = 0.0;
  double tail = 0.0;
};

struct FitOptions {
  int n_modes = -1;  ///< <0: inherit from the input
  int grid = -1;     ///< <0: 4 * n_modes
  bool force = false;
};

/// Inverse diffeomorphism, pointwise Newton on a uniform grid then refit.
/// residual = max |phi(psi(x)) - x| on a staggered 4096-point grid.
DiffeoFit diffeo_invert(const CircleDiffeo& phi, double tol = 1e-12, FitOptions opts = {});

/// Lift of first o second, refitted.
DiffeoFit diffeo_compose(const CircleDiffeo& first, const CircleDiffeo& second, FitOptions opts = {});

struct RotationEstimate {
  double value = 0.0;
  double error = 0.0;
};

/// Rotation number of a circle-homeomorphism lift from n_iter iterates,
/// using a smooth-weight Birkhoff average of the displacement G(x) - x.
RotationEstimate rotation_number(const std::function<double(double)>& lift, long n_iter, double x0 = 0.0);

}  // namespace amspec
