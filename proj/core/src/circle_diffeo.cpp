#include "amspec/circle_diffeo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "amspec/error.hpp"

namespace amspec {
namespace {

constexpr int kMaxModes = 1 << 16;
constexpr int kResidualGrid = 4096;

int validation_grid(int n_modes) { return 8 * n_modes + 64; }

int resolve_modes(const FitOptions& opts, int input_modes) {
  const int n = opts.n_modes >= 0 ? opts.n_modes : (input_modes == 0 ? 0 : kDefaultModes);
  if (n > kMaxModes) throw Error(ErrorCode::TruncationOverflow, "requested modes exceed capacity");
  return n;
}

int resolve_grid(const FitOptions& opts, int n_modes) {
  const int grid = opts.grid > 0 ? opts.grid : std::max(4 * n_modes, 16);
  if (grid <= 2 * n_modes) throw Error(ErrorCode::TruncationOverflow, "grid too coarse for requested modes");
  return grid;
}

}  // namespace

CircleDiffeo::CircleDiffeo(FourierSeries periodic_part) : periodic_(std::move(periodic_part)) {
  const int m = validation_grid(periodic_.n_modes());
  grid_ = periodic_.sample(m);
  for (double d : periodic_.derivative().sample(m)) {
    if (!(1.0 + d > 0.0)) throw Error(ErrorCode::NonInvertible, "1 + p' is not positive on the grid");
  }
}

CircleDiffeo CircleDiffeo::from_derivative_harmonics(const std::vector<double>& cos_amps,
                                                     const std::vector<double>& sin_amps, int n_modes) {
  const int top = static_cast<int>(std::max(cos_amps.size(), sin_amps.size()));
  FourierSeries p(std::max(top, n_modes));
  for (int k = 1; k <= top; ++k) {
    const double c = k <= static_cast<int>(cos_amps.size()) ? cos_amps[k - 1] : 0.0;
    const double s = k <= static_cast<int>(sin_amps.size()) ? sin_amps[k - 1] : 0.0;
    // d/dx [c sin(2 pi k x) - s cos(2 pi k x)] / (2 pi k) = c cos + s sin
    const double scale = kTwoPi * k;
    p += FourierSeries::harmonic(k, -s / scale, c / scale, p.n_modes());
  }
  return CircleDiffeo(std::move(p));
}

double CircleDiffeo::min_derivative() const {
  const auto d = periodic_.derivative().sample(validation_grid(periodic_.n_modes()));
  return 1.0 + *std::min_element(d.begin(), d.end());
}

double CircleDiffeo::inverse_lift(double x, double tol) const {
  const double bound = periodic_.l1_norm() + 1e-9;
  double lo = x - bound;
  double hi = x + bound;
  double y = x - periodic_.eval(x);
  if (!(y > lo && y < hi)) y = 0.5 * (lo + hi);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < 200; ++iter) {
    const double residual = lift(y) - x;
    if (std::abs(residual) <= tol * std::max(1.0, std::abs(x))) return y;
    if (residual > 0.0) {
      hi = y;
    } else {
      lo = y;
    }
    const double slope = derivative(y);
    double next = slope > 0.0 ? y - residual / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 2.0 * eps * std::max(1.0, std::abs(y))) return next;
    if (hi - lo <= 4.0 * eps * std::max(1.0, std::abs(y))) return 0.5 * (lo + hi);
    y = next;
  }
  throw Error(ErrorCode::NoConvergence, "inverse lift Newton iteration stalled at x = " + std::to_string(x));
}

// The periodic part rides on the identity, so its tail is measured against
// max(total, 1); otherwise a near-identity result (phi o phi^-1) divides
// roundoff by roundoff.
static void require_lift_resolved(SeriesFit fit, const char* what) {
  fit.total = std::max(fit.total, 1.0);
  require_resolved(fit, kMaxTailRatio, what);
}

DiffeoFit diffeo_invert(const CircleDiffeo& phi, double tol, FitOptions opts) {
  const int n = resolve_modes(opts, phi.periodic_part().n_modes());
  const int grid = resolve_grid(opts, n);
  std::vector<double> q(static_cast<std::size_t>(grid));
  for (int j = 0; j < grid; ++j) {
    const double x = static_cast<double>(j) / grid;
    q[j] = phi.inverse_lift(x) - x;
  }
  SeriesFit fit = fit_series(q, n);
  if (!opts.force) require_lift_resolved(fit, "diffeo_invert");

  DiffeoFit out{CircleDiffeo(std::move(fit.series)), 0.0, fit.tail};
  for (int j = 0; j < kResidualGrid; ++j) {
    const double x = (j + 0.5) / kResidualGrid;
    out.residual = std::max(out.residual, std::abs(phi.lift(out.diffeo.lift(x)) - x));
  }
  if (out.residual >= tol && !opts.force) {
    throw Error(ErrorCode::NoConvergence,
                "inverse round-trip residual " + std::to_string(out.residual) + " above tolerance");
  }
  return out;
}

DiffeoFit diffeo_compose(const CircleDiffeo& first, const CircleDiffeo& second, FitOptions opts) {
  const int input = std::max(first.periodic_part().n_modes(), second.periodic_part().n_modes());
  const int n = resolve_modes(opts, input);
  const int grid = resolve_grid(opts, n);
  auto exact = [&](double x) { return first.lift(second.lift(x)) - x; };
  SeriesFit fit = fit_series(exact, n, grid);
  if (!opts.force) require_lift_resolved(fit, "diffeo_compose");

  DiffeoFit out{CircleDiffeo(std::move(fit.series)), 0.0, fit.tail};
  for (int j = 0; j < kResidualGrid; ++j) {
    const double x = (j + 0.5) / kResidualGrid;
    out.residual = std::max(out.residual, std::abs(out.diffeo.periodic_part().eval(x) - exact(x)));
  }
  return out;
}

RotationEstimate rotation_number(const std::function<double(double)>& lift, long n_iter, double x0) {
  if (n_iter < 1) throw Error(ErrorCode::InvalidArgument, "rotation_number needs at least one iterate");
  double phase = x0 - std::floor(x0);
  if (n_iter < 16) {
    long double total = 0.0L;
    for (long k = 0; k < n_iter; ++k) {
      const double next = lift(phase);
      total += next - phase;
      phase = next - std::floor(next);
    }
    return {static_cast<double>(total / n_iter), 1.0 / static_cast<double>(n_iter)};
  }

  // Weighted Birkhoff sums with the bump w(t) = exp(-1/(t(1-t))) over the
  // whole orbit and over each half; halves disagreeing bounds the error.
  auto bump = [](double t) { return t <= 0.0 || t >= 1.0 ? 0.0 : std::exp(-1.0 / (t * (1.0 - t))); };
  const long half = n_iter / 2;
  long double num = 0.0L, den = 0.0L;
  long double num_a = 0.0L, den_a = 0.0L;
  long double num_b = 0.0L, den_b = 0.0L;
  for (long k = 0; k < n_iter; ++k) {
    const double next = lift(phase);
    const double disp = next - phase;
    phase = next - std::floor(next);

    const double w = bump((k + 0.5) / n_iter);
    num += w * disp;
    den += w;
    if (k < half) {
      const double wa = bump((k + 0.5) / half);
      num_a += wa * disp;
      den_a += wa;
    } else {
      const double wb = bump((k - half + 0.5) / (n_iter - half));
      num_b += wb * disp;
      den_b += wb;
    }
  }
  RotationEstimate est;
  est.value = static_cast<double>(num / den);
  const double a = static_cast<double>(num_a / den_a);
  const double b = static_cast<double>(num_b / den_b);
  est.error = std::max({std::abs(a - est.value), std::abs(b - est.value), std::abs(a - b)}) + 1e-14;
  return est;
}

}  // namespace amspec
