#include "amspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "amspec/error.hpp"

namespace amspec {
namespace {

double torus_distance(long double x) { return static_cast<double>(std::abs(x - std::nearbyint(x))); }

}  // namespace

std::vector<double> TridiagonalOperator::apply(const std::vector<double>& u) const {
  const std::size_t n = size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double v = diagonal[k] * u[k];
    if (k > 0) v += u[k - 1];
    if (k + 1 < n) v += u[k + 1];
    out[k] = v;
  }
  return out;
}

double TridiagonalOperator::quadratic_form(const std::vector<double>& u) const {
  const std::vector<double> hu = apply(u);
  long double s = 0.0L;
  for (std::size_t k = 0; k < size(); ++k) s += static_cast<long double>(hu[k]) * u[k];
  return static_cast<double>(s);
}

std::vector<double> TridiagonalOperator::eigenvalues() const {
  const Eigen::Index n = static_cast<Eigen::Index>(size());
  if (n == 0) return {};
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(diagonal.data(), n);
  Eigen::VectorXd off = Eigen::VectorXd::Ones(std::max<Eigen::Index>(n - 1, 0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "tridiagonal eigensolver failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + n};
}

std::size_t TridiagonalOperator::count_below(double e) const {
  std::size_t count = 0;
  double d = 1.0;
  for (std::size_t k = 0; k < size(); ++k) {
    d = (diagonal[k] - e) - (k == 0 ? 0.0 : 1.0 / d);
    if (d == 0.0) d = -std::numeric_limits<double>::epsilon() * (std::abs(diagonal[k]) + std::abs(e) + 2.0);
    if (d < 0.0) ++count;
  }
  return count;
}

TridiagonalOperator quasi_periodic_section(const OffsetSeries& V, double alpha, double x0, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "section size must be positive");
  const OffsetSeries v{V.mean, V.fluctuation.trimmed(kCoefficientNoiseFloor)};
  TridiagonalOperator op;
  op.diagonal.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const long double x = static_cast<long double>(x0) + static_cast<long double>(k) * alpha;
    op.diagonal[k] = v(static_cast<double>(x - std::floor(x)));
  }
  return op;
}

SpectralReport finite_section_eigs(const OffsetSeries& V, double alpha, double x0, int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "finite section needs n >= 2");
  SpectralReport rep;
  rep.eigenvalues = quasi_periodic_section(V, alpha, x0, n).eigenvalues();
  rep.top_eigenvalue = rep.eigenvalues.back();
  rep.section_size = n;
  rep.phase = x0;
  rep.ids_samples.reserve(rep.eigenvalues.size());
  for (std::size_t j = 0; j < rep.eigenvalues.size(); ++j) {
    rep.ids_samples.emplace_back(rep.eigenvalues[j], static_cast<double>(j + 1) / n);
  }
  return rep;
}

EdgeProbe edge_probe(const TwistModel& model, const std::vector<int>& sizes, double x0) {
  EdgeProbe probe;
  probe.sizes = sizes;
  const double alpha = model.alpha.value;
  for (int n : sizes) {
    const TridiagonalOperator op = quasi_periodic_section(model.V, alpha, x0, n);
    const double top = op.eigenvalues().back();
    std::vector<double> u(static_cast<std::size_t>(n));
    long double norm2 = 0.0L;
    for (int k = 0; k < n; ++k) {
      const double t = static_cast<double>(k + 1) / (n + 1);
      const double window = 0.5 * (1.0 - std::cos(kTwoPi * t));
      u[k] = model.phi.derivative(x0 + k * alpha) * window;
      norm2 += static_cast<long double>(u[k]) * u[k];
    }
    probe.top.push_back(top);
    probe.rayleigh.push_back(op.quadratic_form(u) / static_cast<double>(norm2));
    probe.fitted_c = std::max(probe.fitted_c, -top * static_cast<double>(n) * n);
  }
  return probe;
}

double ids_estimate(const OffsetSeries& V, double alpha, double x0, double energy, IdsMethod method,
                    IdsOptions opts) {
  if (method == IdsMethod::Counting) {
    const TridiagonalOperator op = quasi_periodic_section(V, alpha, x0, opts.section_size);
    const double above = std::nextafter(energy, std::numeric_limits<double>::infinity());
    return static_cast<double>(op.count_below(above)) / opts.section_size;
  }
  const double rho = fibered_rotation_number(schrodinger_cocycle(V, energy, alpha), opts.rotation_iterates, x0);
  return 1.0 - 2.0 * rho;
}

IdsComparison compare_ids(const OffsetSeries& V, double alpha, double x0, double energy, IdsOptions opts) {
  IdsComparison out;
  out.counting = ids_estimate(V, alpha, x0, energy, IdsMethod::Counting, opts);
  out.rotation = ids_estimate(V, alpha, x0, energy, IdsMethod::Rotation, opts);
  out.method_disagreement = std::abs(out.counting - out.rotation) > 0.02;
  return out;
}

DualVector dual_apply(const OffsetSeries& V, double alpha, double x0, const DualVector& u) {
  if (u.size() % 2 == 0) throw Error(ErrorCode::InvalidArgument, "dual vector must have odd length");
  const FourierSeries stored = V.combined();
  const int n_stored = stored.n_modes();
  if (n_stored > 0 && std::abs(stored.coeff(n_stored)) > 1e-13 * stored.l1_norm()) {
    throw Error(ErrorCode::WindowTooSmall, "potential coefficients do not decay within the stored modes");
  }
  const FourierSeries v = stored.trimmed(1e-18);
  const int nv = v.n_modes();
  const int ku = static_cast<int>(u.size() / 2);
  const int kout = ku + nv;
  DualVector out(2 * static_cast<std::size_t>(kout) + 1, cplx{0.0, 0.0});
  for (int n = -kout; n <= kout; ++n) {
    cplx acc{0.0, 0.0};
    const int lo = std::max(-ku, n - nv);
    const int hi = std::min(ku, n + nv);
    for (int k = lo; k <= hi; ++k) acc += v.coeff(n - k) * u[static_cast<std::size_t>(k + ku)];
    if (std::abs(n) <= ku) {
      const long double phase = static_cast<long double>(x0) + static_cast<long double>(n) * alpha;
      acc += 2.0 * std::cos(kTwoPi * static_cast<double>(phase - std::floor(phase))) *
             u[static_cast<std::size_t>(n + ku)];
    }
    out[static_cast<std::size_t>(n + kout)] = acc;
  }
  return out;
}

double l2_norm(const DualVector& u) {
  long double s = 0.0L;
  for (const auto& c : u) s += std::norm(c);
  return std::sqrt(static_cast<double>(s));
}

DualCheck dual_eigencheck(const TwistModel& model) {
  const FourierSeries& p = model.phi.periodic_part();
  FourierSeries dphi = p.derivative();
  dphi.set_coeff(0, 1.0);
  dphi = dphi.trimmed(1e-18);
  const DualVector u(dphi.coefficients().begin(), dphi.coefficients().end());

  DualCheck out;
  out.residual = l2_norm(dual_apply(model.V, model.alpha.value, 0.0, u)) / l2_norm(u);

  double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
  int count = 0;
  const double floor = 1e-15 * dphi.l1_norm();
  for (int k = 0; k <= dphi.n_modes(); ++k) {
    const double mag = std::abs(dphi.coeff(k));
    if (mag <= floor) continue;
    const double y = std::log(mag);
    sk += k;
    sy += y;
    skk += static_cast<double>(k) * k;
    sky += k * y;
    ++count;
  }
  out.decay_rate = count < 2 ? -std::numeric_limits<double>::infinity()
                             : (count * sky - sk * sy) / (count * skk - sk * sk);

  const double alpha = model.alpha.value;
  for (int j = 0; j < 4096; ++j) {
    const double x = (j + 0.5) / 4096;
    const double ratio = (model.phi.derivative(x + alpha) + model.phi.derivative(x - alpha)) / model.phi.derivative(x);
    out.potential_identity = std::max(out.potential_identity, std::abs(model.V(x) + ratio));
  }
  return out;
}

ResonanceReport resonance_scan(double x0, double alpha, double epsilon0, long bound) {
  if (bound < 1) throw Error(ErrorCode::InvalidArgument, "resonance scan bound must be >= 1");
  ResonanceReport rep{epsilon0, {}, x0, bound};
  auto dist = [&](long k) {
    return torus_distance(2.0L * static_cast<long double>(x0) - static_cast<long double>(k) * alpha);
  };
  double running_min = std::numeric_limits<double>::infinity();
  for (long j = 0; j <= bound; ++j) {
    const double dp = dist(j);
    const double dm = dist(-j);
    running_min = std::min({running_min, dp, dm});
    const double threshold = std::exp(-epsilon0 * static_cast<double>(j));
    if (j == 0) {
      if (dp <= threshold) rep.resonances.push_back(0);
      continue;
    }
    // On an exact tie (only when 4 x0 is an integer) +j is kept, so |k| stays strictly increasing.
    if (dp <= threshold && dp == running_min) {
      rep.resonances.push_back(j);
    } else if (dm <= threshold && dm == running_min) {
      rep.resonances.push_back(-j);
    }
  }
  return rep;
}

double spectral_measure_factor(const MatrixCocycle& c, double eps, int phases) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  const long kmax = static_cast<long>(std::ceil(1.0 / eps));
  const std::vector<double> sup = sup_norm_growth(c, kmax, phases);
  const double worst = *std::max_element(sup.begin(), sup.end());
  if (!std::isfinite(worst)) throw Error(ErrorCode::Overflow, "cocycle iterates passed the norm guard");
  return eps * worst * worst;
}

double spectral_measure_bound(const TwistModel& model, double energy, double eps, int phases) {
  return spectral_measure_factor(schrodinger_cocycle(model.V, energy, model.alpha.value), eps, phases);
}

std::vector<HomogeneityPoint> homogeneity_probe(const TwistModel& model, int n, double window,
                                                const std::vector<double>& eps_values, int max_energies) {
  const std::vector<double> eig = finite_section_eigs(model.V, model.alpha.value, 0.0, n).eigenvalues;
  std::vector<double> inside;
  for (double e : eig) {
    if (e > -window && e < 0.0) inside.push_back(e);
  }
  std::vector<HomogeneityPoint> out;
  if (inside.empty()) return out;
  const int picks = std::min<int>(max_energies, static_cast<int>(inside.size()));
  const double resolution = 2.0 / n;
  for (int i = 0; i < picks; ++i) {
    const double energy = inside[static_cast<std::size_t>(i) * inside.size() / picks];
    for (double eps : eps_values) {
      if (!(eps > 0.0 && eps < std::abs(energy))) continue;
      constexpr int net = 101;
      int hits = 0;
      for (int j = 0; j < net; ++j) {
        const double e = energy - eps + 2.0 * eps * j / (net - 1);
        auto it = std::lower_bound(eig.begin(), eig.end(), e);
        double nearest = std::numeric_limits<double>::infinity();
        if (it != eig.end()) nearest = std::min(nearest, *it - e);
        if (it != eig.begin()) nearest = std::min(nearest, e - *std::prev(it));
        if (nearest <= resolution) ++hits;
      }
      out.push_back({energy, eps, static_cast<double>(hits) / net});
    }
  }
  return out;
}

}  // namespace amspec
