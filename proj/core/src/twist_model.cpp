#include "amspec/twist_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "amspec/error.hpp"

namespace amspec {
namespace {

constexpr int kCertificationGrid = 4096;

double staggered(int j, int m) { return (j + 0.5) / m; }

void certify(TwistModel& model) {
  ModelResiduals& res = model.residuals;
  res.invariance = invariance_residual(model.f, model.gamma.mean, model.gamma.fluctuation, kCertificationGrid);
  res.mean_f = std::abs(model.f.mean());
  res.g_consistency = 0.0;
  res.derivative_identity = 0.0;
  const double alpha = model.alpha.value;
  for (int j = 0; j < kCertificationGrid; ++j) {
    const double x = staggered(j, kCertificationGrid);
    const double y = model.phi.inverse_lift(x);
    const double g_conj = model.phi.lift(y + alpha);
    res.g_consistency = std::max(res.g_consistency, std::abs(g_conj - model.g(x)));
    const double lhs = model.g_derivative(x) * (1.0 - model.gamma.eval_derivative(model.g(x)));
    res.derivative_identity = std::max(res.derivative_identity, std::abs(lhs - 1.0));
  }
  model.strip_h0 = fit_strip_width(model.V.fluctuation);
}

}  // namespace

double invariance_residual(const FourierSeries& f, double gamma_mean, const FourierSeries& gamma0, int grid) {
  double worst = 0.0;
  for (int j = 0; j < grid; ++j) {
    const double x = staggered(j, grid);
    const double r_next = gamma_mean + gamma0.eval(x) + f.eval(x);
    const double x_next = x + r_next;
    worst = std::max(worst, std::abs(r_next - (gamma_mean + gamma0.eval(x_next))));
  }
  return worst;
}

TwistModel construct_from_conjugacy(const Frequency& alpha, const CircleDiffeo& phi, ConstructOptions opts) {
  if (is_effectively_rational(alpha)) {
    throw Error(ErrorCode::InvalidArgument, "frequency " + alpha.decimal + " is rational at working precision");
  }
  const int m = std::max(opts.grid, 4 * opts.modes);
  const double a = alpha.value;
  const FourierSeries& p = phi.periodic_part();

  std::vector<double> f_samples(static_cast<std::size_t>(m));
  std::vector<double> gamma_samples(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double x = static_cast<double>(j) / m;
    const double y = phi.inverse_lift(x);
    // Linear parts of the lifts cancel, leaving periodic differences of p.
    const double p0 = p.eval(y);
    const double p_plus = p.eval(y + a);
    const double p_minus = p.eval(y - a);
    f_samples[j] = p_plus - 2.0 * p0 + p_minus;
    gamma_samples[j] = a + p0 - p_minus;
  }
  SeriesFit f_fit = fit_series(f_samples, opts.modes);
  SeriesFit gamma_fit = fit_series(gamma_samples, opts.modes);
  if (!opts.allow_uncertified) {
    require_resolved(f_fit, kMaxTailRatio, "force f");
    require_resolved(gamma_fit, kMaxTailRatio, "graph gamma");
  }

  TwistModel model;
  model.alpha = alpha;
  model.phi = phi;
  model.f = std::move(f_fit.series);
  model.gamma = OffsetSeries::split(gamma_fit.series);
  model.modes = opts.modes;
  model.grid = m;

  const FourierSeries df = model.f.derivative();
  std::vector<double> v_samples(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double theta = static_cast<double>(j) / m;
    v_samples[j] = -df.eval(phi.lift(theta)) - 2.0;
  }
  SeriesFit v_fit = fit_series(v_samples, opts.modes);
  if (!opts.allow_uncertified) require_resolved(v_fit, kMaxTailRatio, "potential V");
  model.V = OffsetSeries::split(v_fit.series);

  certify(model);
  if (!opts.allow_uncertified) {
    const ModelResiduals& r = model.residuals;
    const double worst = std::max({r.invariance, r.mean_f, r.g_consistency, r.derivative_identity});
    if (!(worst < opts.tolerance)) {
      std::ostringstream msg;
      msg << "invariance " << r.invariance << ", mean(f) " << r.mean_f << ", g-consistency " << r.g_consistency
          << ", derivative identity " << r.derivative_identity << " (tolerance " << opts.tolerance << ")";
      throw Error(ErrorCode::InvarianceCertificationFailed, msg.str());
    }
  }
  return model;
}

InducedMap induced_circle_map(const TwistModel& model, double tol) {
  const double a = model.alpha.value;
  auto conj = [&](double x) { return model.phi.lift(model.phi.inverse_lift(x) + a) - x; };
  SeriesFit fit = fit_series(conj, model.modes, std::max(model.grid, 4 * model.modes));
  InducedMap out{CircleDiffeo(std::move(fit.series)), 0.0};
  for (int j = 0; j < kCertificationGrid; ++j) {
    const double x = staggered(j, kCertificationGrid);
    const double direct = x + conj(x);
    out.disagreement = std::max({out.disagreement, std::abs(direct - model.g(x)), std::abs(out.g.lift(x) - direct)});
  }
  if (out.disagreement > tol) {
    throw Error(ErrorCode::ConsistencyFailure,
                "two constructions of g disagree by " + std::to_string(out.disagreement));
  }
  return out;
}

OffsetSeries gamma_from_g(const CircleDiffeo& g, int modes) {
  const DiffeoFit inv = diffeo_invert(g, 1e-12, FitOptions{modes, -1, false});
  // gamma(x) = x - g^-1(x) = -(periodic part of g^-1)
  return OffsetSeries::split(-inv.diffeo.periodic_part());
}

void recertify(TwistModel& model) { certify(model); }

}  // namespace amspec
