#include "amspec/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "amspec/error.hpp"

namespace amspec {
namespace {

constexpr double kNormGuard = 1e150;
constexpr int kCheckGrid = 4096;
constexpr double kStripNoiseFloor = 1e-13;

double frac(long double x) { return static_cast<double>(x - std::floor(x)); }

// Phase of the k-th iterate over a rotation, without accumulated drift.
double rotation_phase(double x0, double alpha, long k) {
  return frac(static_cast<long double>(x0) + static_cast<long double>(k) * static_cast<long double>(alpha));
}

// Polar rotation angle of A = R_theta P with P symmetric positive definite.
double polar_angle(const Mat2& m) { return std::atan2(m.c - m.b, m.a + m.d); }

// Unwrapped polar angle sampled on a uniform grid; used to pick a continuous branch.
std::vector<double> unwrapped_polar_angle(const MatrixCocycle& c, int grid) {
  std::vector<double> theta(static_cast<std::size_t>(grid) + 1);
  theta[0] = polar_angle(c.at(0.0));
  for (int j = 1; j <= grid; ++j) {
    double t = polar_angle(c.at(static_cast<double>(j) / grid));
    while (t - theta[j - 1] > M_PI) t -= kTwoPi;
    while (t - theta[j - 1] < -M_PI) t += kTwoPi;
    theta[j] = t;
  }
  return theta;
}

double first_column_winding(const MatrixCocycle& c, int grid) {
  double total = 0.0;
  Mat2 prev = c.at(0.0);
  for (int j = 1; j <= grid; ++j) {
    const Mat2 cur = c.at(static_cast<double>(j) / grid);
    double step = std::atan2(cur.c, cur.a) - std::atan2(prev.c, prev.a);
    while (step > M_PI) step -= kTwoPi;
    while (step < -M_PI) step += kTwoPi;
    total += step;
    prev = cur;
  }
  return total / kTwoPi;
}

template <class Eval, class Advance>
double renormalized_log_norm(long n, int every, double x0, Eval eval, Advance advance) {
  using M = decltype(eval(x0));
  M prod = M::identity();
  double x = x0;
  double log_scale = 0.0;
  for (long k = 1; k <= n; ++k) {
    prod = eval(x) * prod;
    x = advance(x, k);
    if (k % every == 0) {
      const double s = max_abs(prod);
      prod *= 1.0 / s;
      log_scale += std::log(s);
    }
  }
  return log_scale + std::log(op_norm(prod));
}

}  // namespace

MatrixSeries MatrixSeries::constant(const Mat2& m) {
  return {{FourierSeries::constant(m.a), FourierSeries::constant(m.b), FourierSeries::constant(m.c),
           FourierSeries::constant(m.d)}};
}

MatrixSeries MatrixSeries::fit(const std::function<Mat2(double)>& fn, int modes, int grid) {
  std::array<std::vector<double>, 4> samples;
  for (auto& s : samples) s.resize(static_cast<std::size_t>(grid));
  for (int j = 0; j < grid; ++j) {
    const Mat2 m = fn(static_cast<double>(j) / grid);
    samples[0][j] = m.a;
    samples[1][j] = m.b;
    samples[2][j] = m.c;
    samples[3][j] = m.d;
  }
  MatrixSeries out;
  for (int e = 0; e < 4; ++e) out.entries[e] = fit_series(samples[e], modes).series.trimmed(kCoefficientNoiseFloor);
  return out;
}

double MatrixSeries::strip_width() const {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) h = std::min(h, fit_strip_width(e));
  return h;
}

double MatrixCocycle::advance(double x) const {
  const double next = base_map ? base_map->lift(x) : x + alpha;
  return next - std::floor(next);
}

cplx MatrixCocycle::advance(cplx z) const {
  if (base_map) throw Error(ErrorCode::InvalidArgument, "complex phases need a rotation base");
  return {z.real() + alpha - std::floor(z.real() + alpha), z.imag()};
}

double MatrixCocycle::sl2_defect(int grid) const {
  double worst = 0.0;
  for (int j = 0; j < grid; ++j) worst = std::max(worst, std::abs(at(static_cast<double>(j) / grid).det() - 1.0));
  return worst;
}

Mat2 twist_jacobian(const FourierSeries& f, double x) {
  const double df = f.eval_derivative(x);
  return {1.0 + df, 1.0, df, 1.0};
}

MatrixCocycle derivative_cocycle(const TwistModel& model) {
  const FourierSeries df = model.f.derivative();
  FourierSeries a = df;
  a.set_coeff(0, 1.0 + df.mean());
  MatrixCocycle c;
  c.alpha = model.alpha.value;
  c.base_map = CircleDiffeo(model.gamma.combined() + model.f);
  c.matrix.entries = {a, FourierSeries::constant(1.0), df, FourierSeries::constant(1.0)};
  return c;
}

MatrixCocycle schrodinger_cocycle(const OffsetSeries& V, double energy, double alpha) {
  FourierSeries diag = -V.fluctuation.trimmed(kCoefficientNoiseFloor);
  diag.set_coeff(0, energy - V.mean);
  MatrixCocycle c;
  c.alpha = alpha;
  c.matrix.entries = {diag, FourierSeries::constant(-1.0), FourierSeries::constant(1.0), FourierSeries::constant(0.0)};
  return c;
}

Iterates cocycle_iterates(const MatrixCocycle& c, long n, double x0) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "cocycle_iterates needs n >= 1");
  Iterates out;
  out.products.reserve(static_cast<std::size_t>(n));
  Mat2 prod = Mat2::identity();
  double x = x0 - std::floor(x0);
  for (long k = 1; k <= n; ++k) {
    prod = c.at(x) * prod;
    x = c.base_map ? c.advance(x) : rotation_phase(x0, c.alpha, k);
    if (!(op_norm(prod) < kNormGuard)) {
      out.overflow = true;
      break;
    }
    out.products.push_back(prod);
  }
  return out;
}

std::vector<double> sup_norm_growth(const MatrixCocycle& c, long n, int phases) {
  std::vector<double> sup(static_cast<std::size_t>(n) + 1, 0.0);
  sup[0] = 1.0;
  for (int j = 0; j < phases; ++j) {
    const Iterates it = cocycle_iterates(c, n, static_cast<double>(j) / phases);
    for (std::size_t k = 0; k < it.products.size(); ++k) sup[k + 1] = std::max(sup[k + 1], op_norm(it.products[k]));
    if (it.overflow) {
      for (std::size_t k = it.products.size() + 1; k < sup.size(); ++k) sup[k] = std::numeric_limits<double>::infinity();
    }
  }
  return sup;
}

double lyapunov_exponent(const MatrixCocycle& c, long n, double delta, LyapunovOptions opts) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "lyapunov_exponent needs n >= 1");
  if (delta != 0.0) {
    const double h = c.matrix.strip_width();
    if (!(std::abs(delta) < h)) {
      std::ostringstream msg;
      msg << "strip offset " << delta << " reaches fitted analyticity width " << h;
      throw Error(ErrorCode::StripTooWide, msg.str());
    }
  }
  // Coefficients below the fit's noise floor are not part of the analytic
  // extension; off the real axis they would be amplified by exp(2 pi k delta).
  MatrixSeries analytic = c.matrix;
  for (auto& e : analytic.entries) e = e.trimmed(kStripNoiseFloor);
  long double total = 0.0L;
  for (int j = 0; j < opts.phases; ++j) {
    const double x0 = static_cast<double>(j) / opts.phases;
    double log_norm = 0.0;
    if (delta == 0.0) {
      log_norm = renormalized_log_norm(
          n, opts.renormalize_every, x0, [&](double x) { return c.at(x); },
          [&](double x, long k) { return c.base_map ? c.advance(x) : rotation_phase(x0, c.alpha, k); });
    } else {
      if (c.base_map) throw Error(ErrorCode::InvalidArgument, "complex strip needs a rotation base");
      log_norm = renormalized_log_norm(
          n, opts.renormalize_every, x0, [&](double x) { return analytic(cplx{x, delta}); },
          [&](double, long k) { return rotation_phase(x0, c.alpha, k); });
    }
    total += log_norm / static_cast<double>(n);
  }
  return static_cast<double>(total / opts.phases);
}

double fibered_rotation_number(const MatrixCocycle& c, long n, double x0) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "fibered_rotation_number needs n >= 1");
  constexpr int grid = 1024;
  const double column_winding = first_column_winding(c, grid);
  const std::vector<double> theta_grid = unwrapped_polar_angle(c, grid);
  const double polar_winding = (theta_grid[grid] - theta_grid[0]) / kTwoPi;
  if (std::abs(column_winding) > 0.5 || std::abs(polar_winding) > 0.5) {
    throw Error(ErrorCode::WindingNonzero, "cocycle is not homotopic to the identity");
  }

  // Branch of the polar angle closest to the interpolated unwrapped value.
  auto lifted_angle = [&](const Mat2& m, double x) {
    const double pos = x * grid;
    const int j = std::min(static_cast<int>(pos), grid - 1);
    const double t = pos - j;
    const double ref = (1.0 - t) * theta_grid[j] + t * theta_grid[j + 1];
    double th = polar_angle(m);
    while (th - ref > M_PI) th -= kTwoPi;
    while (th - ref < -M_PI) th += kTwoPi;
    return th;
  };

  Vec2 v{1.0, 0.0};
  double x = x0 - std::floor(x0);
  long double total = 0.0L;
  for (long k = 1; k <= n; ++k) {
    const Mat2 m = c.at(x);
    const double th = lifted_angle(m, x);
    // P = R_{-theta} A is symmetric positive definite; P v stays within pi/2 of v.
    const double ct = std::cos(th), st = std::sin(th);
    const Mat2 p{ct * m.a + st * m.c, ct * m.b + st * m.d, -st * m.a + ct * m.c, -st * m.b + ct * m.d};
    const Vec2 w = p * v;
    total += th + std::atan2(v.x * w.y - v.y * w.x, v.x * w.x + v.y * w.y);
    Vec2 next = m * v;
    const double len = std::hypot(next.x, next.y);
    v = {next.x / len, next.y / len};
    x = c.base_map ? c.advance(x) : rotation_phase(x0, c.alpha, k);
  }
  return static_cast<double>(total / (kTwoPi * static_cast<long double>(n)));
}

MatrixCocycle conjugate_cocycle(const MatrixCocycle& c, const std::function<Mat2(double)>& B, int modes, int grid) {
  for (int j = 0; j < grid; ++j) {
    if (std::abs(B(static_cast<double>(j) / grid).det()) < 1e-12) {
      throw Error(ErrorCode::SingularConjugator, "conjugator is singular on the grid");
    }
  }
  MatrixCocycle out;
  out.alpha = c.alpha;
  out.base_map = c.base_map;
  out.matrix = MatrixSeries::fit(
      [&](double x) { return B(c.advance(x)).inverse() * c.at(x) * B(x); }, modes, grid);
  return out;
}

CohomologicalSolution solve_cohomological(const FourierSeries& nu, double alpha, double divisor_floor) {
  const double norm = nu.zero_mean().l1_norm();
  const double floor = divisor_floor < 0.0 ? 1e-12 * norm : divisor_floor;
  const double tail_level = 1e-15 * norm;
  CohomologicalSolution out{FourierSeries(nu.n_modes()), 0.0};
  for (int k = 1; k <= nu.n_modes(); ++k) {
    const cplx divisor = std::polar(1.0, kTwoPi * k * alpha) - 1.0;
    const cplx nk = nu.coeff(k);
    if (std::abs(divisor) < floor) {
      if (std::abs(nk) > tail_level) {
        throw Error(ErrorCode::SmallDivisorBreakdown,
                    "divisor at k = " + std::to_string(k) + " below floor with unresolved coefficient");
      }
      continue;
    }
    out.mu.set_coeff(k, nk / divisor);
  }
  const double mean = nu.mean();
  for (int j = 0; j < kCheckGrid; ++j) {
    const double x = (j + 0.5) / kCheckGrid;
    const double lhs = out.mu.eval(x + alpha) - out.mu.eval(x);
    out.residual = std::max(out.residual, std::abs(lhs - (nu.eval(x) - mean)));
  }
  return out;
}

Mat2 reduction_closed_form(const TwistModel& model, const FourierSeries& mu, double x) {
  const double d0 = model.phi.derivative(x);
  const double dm = model.phi.derivative(x - model.alpha.value);
  const double m = mu.eval(x);
  return {d0, m * d0, dm, 1.0 / d0 + m * dm};
}

ReductionResult parabolic_reduce(const TwistModel& model, double max_residual) {
  const double alpha = model.alpha.value;
  const CircleDiffeo& phi = model.phi;
  const int grid = std::max(model.grid, 4 * model.modes);

  SeriesFit nu_fit = fit_series(
      [&](double x) { return -1.0 / (phi.derivative(x) * phi.derivative(x + alpha)); }, model.modes, grid);
  require_resolved(nu_fit, kMaxTailRatio, "nu");

  ReductionResult out;
  out.nu = std::move(nu_fit.series);
  out.nu0 = out.nu.mean();
  CohomologicalSolution sol = solve_cohomological(out.nu.zero_mean(), alpha);
  out.mu = std::move(sol.mu);

  const FourierSeries mu = out.mu;
  out.Z = [&model, mu](double x) {
    const double dphi = model.phi.derivative(x);
    const double dgamma = model.gamma.eval_derivative(model.phi.lift(x));
    const Mat2 z1{1.0, 0.0, dgamma, 1.0};
    const Mat2 z2 = kConjugatorM * z1;
    const Mat2 z3 = z2 * Mat2::diag(dphi, -1.0 / dphi);
    return z3 * Mat2{1.0, mu.eval(x), 0.0, 1.0};
  };

  const Mat2 b0 = out.B0();
  out.z_min_det = std::numeric_limits<double>::infinity();
  out.z_max_det = -std::numeric_limits<double>::infinity();
  out.z11_min = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kCheckGrid; ++j) {
    const double x = (j + 0.5) / kCheckGrid;
    const Mat2 z = out.Z(x);
    const Mat2 z_next = out.Z(x + alpha);
    const Mat2 s{-model.V(x), -1.0, 1.0, 0.0};
    out.residual = std::max(out.residual, max_abs(z_next.inverse() * s * z - b0));
    out.formula_mismatch = std::max(out.formula_mismatch, max_abs(z - reduction_closed_form(model, mu, x)));
    out.z_sup_norm = std::max(out.z_sup_norm, op_norm(z));
    out.z_min_det = std::min(out.z_min_det, z.det());
    out.z_max_det = std::max(out.z_max_det, z.det());
    out.z11_min = std::min(out.z11_min, z.a);
  }
  if (out.residual > max_residual) {
    throw Error(ErrorCode::ResidualTooLarge, "parabolic reduction residual " + std::to_string(out.residual));
  }
  return out;
}

BlochCheck bloch_section_check(const TwistModel& model) {
  const double alpha = model.alpha.value;
  BlochCheck out;
  for (int j = 0; j < kCheckGrid; ++j) {
    const double x = (j + 0.5) / kCheckGrid;
    const double d0 = model.phi.derivative(x);
    const double dp = model.phi.derivative(x + alpha);
    const double dm = model.phi.derivative(x - alpha);
    const double v = model.V(x);
    const Mat2 s{-v, -1.0, 1.0, 0.0};
    const Vec2 image = s * Vec2{d0, dm};
    out.section = std::max({out.section, std::abs(image.x - dp), std::abs(image.y - d0)});
    out.scalar = std::max(out.scalar, std::abs(v * d0 + dp + dm));
  }
  return out;
}

Q0Normalization q0_normalize(double nu0) {
  if (!(nu0 < 0.0)) throw Error(ErrorCode::PositiveNu0, "nu0 = " + std::to_string(nu0) + " is not negative");
  const double nu1 = std::sqrt(-nu0);
  Q0Normalization out;
  out.Q0 = {-nu1 / 2.0, -nu1 / 2.0, 1.0 / nu1, -1.0 / nu1};
  const Mat2 b0{1.0, nu0, 0.0, 1.0};
  out.check = max_abs(out.Q0.inverse() * b0 * out.Q0 - Mat2{2.0, -1.0, 1.0, 0.0});
  return out;
}

PerturbationSymbol perturbation_symbol(const TwistModel& model, const ReductionResult& red, double eps, int grid) {
  if (!(eps != 0.0)) throw Error(ErrorCode::InvalidArgument, "perturbation size must be nonzero");
  const Mat2 q0 = q0_normalize(red.nu0).Q0;
  const Mat2 target{2.0, -1.0, 1.0, 0.0};
  const double alpha = model.alpha.value;
  PerturbationSymbol out;
  out.eps = eps;
  out.mean = {0.0, 0.0, 0.0, 0.0};
  for (int j = 0; j < grid; ++j) {
    const double x = (j + 0.5) / grid;
    const Mat2 z0 = red.Z(x) * q0;
    const Mat2 z0_next = red.Z(x + alpha) * q0;
    const Mat2 s{eps - model.V(x), -1.0, 1.0, 0.0};
    Mat2 p = z0_next.inverse() * s * z0 - target;
    p *= 1.0 / eps;
    out.sup_norm = std::max(out.sup_norm, op_norm(p));
    p *= 1.0 / grid;
    out.mean = out.mean + p;
  }
  return out;
}

const char* to_string(UhVerdict v) {
  switch (v) {
    case UhVerdict::Hyperbolic: return "true";
    case UhVerdict::NotHyperbolic: return "false";
    case UhVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

UhResult uh_test(const MatrixCocycle& c, long n, UhOptions opts) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "uh_test needs n >= 2");
  double margin = std::numeric_limits<double>::infinity();
  const double envelope = 2.0 * std::log(static_cast<double>(n));
  for (int j = 0; j < opts.phases; ++j) {
    const double x0 = static_cast<double>(j) / opts.phases;
    const double log_norm = renormalized_log_norm(
        n, 32, x0, [&](double x) { return c.at(x); },
        [&](double x, long k) { return c.base_map ? c.advance(x) : rotation_phase(x0, c.alpha, k); });
    margin = std::min(margin, (log_norm - envelope) / static_cast<double>(n));
  }
  UhResult out;
  out.margin = margin;
  const double noise = 1.0 / static_cast<double>(n);
  if (margin > noise) {
    out.verdict = UhVerdict::Hyperbolic;
  } else if (margin < -noise) {
    out.verdict = UhVerdict::NotHyperbolic;
  }
  return out;
}

}  // namespace amspec
