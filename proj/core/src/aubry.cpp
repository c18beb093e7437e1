#include "amspec/aubry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "amspec/error.hpp"

namespace amspec {
namespace {

struct PeriodicProblem {
  const FourierSeries& f;
  const FourierSeries& df;
  long p;
  int q;

  double at(const Eigen::VectorXd& x, long n) const {
    const long m = ((n % q) + q) % q;
    const long shift = (n - m) / q;
    return x[m] + static_cast<double>(shift * p);
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
    Eigen::VectorXd r(q);
    for (int n = 0; n < q; ++n) r[n] = (at(x, n + 1) - x[n]) - (x[n] - at(x, n - 1)) - f.eval(x[n]);
    return r;
  }

  // Jacobian of the residual, which is the periodic H.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(q, q);
    for (int n = 0; n < q; ++n) {
      J(n, n) += -df.eval(x[n]) - 2.0;
      J(n, (n + 1) % q) += 1.0;
      J(n, (n - 1 + q) % q) += 1.0;
    }
    return J;
  }
};

double sup(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Returns true when the residual reached tol.
bool newton(const PeriodicProblem& prob, Eigen::VectorXd& x, const MinimizeOptions& opts, int& iterations) {
  Eigen::VectorXd r = prob.residual(x);
  double merit = r.squaredNorm();
  int polish = 2;
  for (int it = 0; it < opts.max_iter; ++it) {
    // A couple of extra steps past tol cost little once convergence is quadratic.
    if (sup(r) < opts.tol && polish-- == 0) return true;
    ++iterations;
    const Eigen::MatrixXd J = prob.jacobian(x);
    // Minimum-norm step; the translation mode is singular when f = 0.
    const Eigen::VectorXd step = -J.completeOrthogonalDecomposition().solve(r);
    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      const Eigen::VectorXd trial = x + t * step;
      const Eigen::VectorXd rt = prob.residual(trial);
      const double mt = rt.squaredNorm();
      if (mt <= (1.0 - 1e-4 * t) * merit) {
        x = trial;
        r = rt;
        merit = mt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return sup(r) < opts.tol;
}

}  // namespace

void PeriodicOrbitSpec::validate() const {
  if (q <= 0) throw Error(ErrorCode::InvalidArgument, "period q must be positive");
  if (std::gcd(p, q) != 1) {
    throw Error(ErrorCode::InvalidArgument,
                "rotation number " + std::to_string(p) + "/" + std::to_string(q) + " is not in lowest terms");
  }
}

PeriodicMinimizer minimize_periodic(const FourierSeries& f_in, const PeriodicOrbitSpec& spec, MinimizeOptions opts) {
  spec.validate();
  const FourierSeries f = f_in.trimmed(kCoefficientNoiseFloor);
  const FourierSeries df = f.derivative();
  const int q = static_cast<int>(spec.q);
  const PeriodicProblem prob{f, df, spec.p, q};
  const double df_sup = df.sup_norm(std::max(64, 8 * df.n_modes() + 16));
  const double descent_step = 1.0 / (4.0 + df_sup);
  const GeneratingFunction h(f, spec.a);

  const int starts = std::min(opts.max_starts, 2 * q);
  bool any_converged = false;
  double best_top = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    const double x0 = static_cast<double>(s) / (2.0 * q);
    Eigen::VectorXd x(q);
    for (int n = 0; n < q; ++n) x[n] = x0 + static_cast<double>(n * spec.p) / q;

    // The action gradient is -residual, so descent moves along +residual.
    for (int k = 0; k < opts.descent_steps; ++k) {
      const Eigen::VectorXd r = prob.residual(x);
      if (sup(r) < opts.tol) break;
      x += descent_step * r;
    }
    int iterations = 0;
    if (!newton(prob, x, opts, iterations)) continue;
    any_converged = true;

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(prob.jacobian(x), Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues().maxCoeff();
    best_top = std::max(best_top, top);
    if (top > opts.hessian_slack) continue;

    PeriodicMinimizer out;
    out.config.points.resize(static_cast<std::size_t>(q) + 1);
    for (int n = 0; n <= q; ++n) out.config.points[n] = prob.at(x, n);
    long double action = 0.0L;
    for (int n = 0; n < q; ++n) action += h(out.config.points[n], out.config.points[n + 1]);
    out.action = static_cast<double>(action);
    out.residual = sup(prob.residual(x));
    out.top_eigenvalue = top;
    out.mean_r = (out.config.points[q] - out.config.points[0]) / q;
    out.start_index = s;
    out.iterations = iterations;
    return out;
  }
  if (!any_converged) {
    throw Error(ErrorCode::NoConvergence, "no start reached the residual tolerance for " + std::to_string(spec.p) +
                                              "/" + std::to_string(spec.q));
  }
  throw Error(ErrorCode::SaddlePoint, "every converged start has a positive Hessian direction (top eigenvalue " +
                                          std::to_string(best_top) + ")");
}

Configuration unroll(const PeriodicMinimizer& m, const PeriodicOrbitSpec& spec, int periods) {
  const std::size_t q = static_cast<std::size_t>(spec.q);
  Configuration c;
  c.points.resize(q * static_cast<std::size_t>(periods) + 1);
  for (std::size_t n = 0; n < c.points.size(); ++n) {
    c.points[n] = m.config.points[n % q] + static_cast<double>((n / q) * spec.p);
  }
  return c;
}

TridiagonalOperator build_schrodinger_sequence(const FourierSeries& f, const std::vector<double>& phases) {
  const FourierSeries df = f.trimmed(kCoefficientNoiseFloor).derivative();
  TridiagonalOperator op;
  op.diagonal.reserve(phases.size());
  for (double x : phases) op.diagonal.push_back(-df.eval(x) - 2.0);
  return op;
}

TridiagonalOperator configuration_hessian(const FourierSeries& f, const Configuration& c) {
  if (c.size() < 3) throw Error(ErrorCode::InvalidArgument, "configuration needs interior points");
  return build_schrodinger_sequence(f, std::vector<double>(c.points.begin() + 1, c.points.end() - 1));
}

double gradient_check(const FourierSeries& f, double a, const Configuration& c, double h) {
  const std::vector<double> res = euler_lagrange_residual(f, c);
  const GeneratingFunction gen(f, a);
  double scale = 1.0;
  for (double r : res) scale = std::max(scale, std::abs(r));
  double worst = 0.0;
  Configuration plus = c, minus = c;
  for (std::size_t n = 1; n + 1 < c.size(); ++n) {
    plus.points[n] = c.points[n] + h;
    minus.points[n] = c.points[n] - h;
    const double dplus = action_difference(gen, c, plus, n, n);
    const double dminus = action_difference(gen, c, minus, n, n);
    plus.points[n] = minus.points[n] = c.points[n];
    const double fd = (dplus - dminus) / (2.0 * h);
    worst = std::max(worst, std::abs(fd + res[n - 1]));
  }
  return worst / scale;
}

DerivativeCheck hessian_consistency_check(const FourierSeries& f, double a, const Configuration& c, double h) {
  DerivativeCheck out;
  out.grad_err = gradient_check(f, a, c, h);

  const TridiagonalOperator H = configuration_hessian(f, c);
  const GeneratingFunction gen(f, a);
  double scale = 1.0;
  for (double d : H.diagonal) scale = std::max(scale, std::abs(d));

  // Second differences of A over pairs (n, m) with m in {n, n+1, n+2}; the
  // action Hessian is -H, whose entries beyond the first off-diagonal vanish.
  const std::size_t last = c.size() - 2;
  double worst = 0.0;
  Configuration work = c;
  auto shifted_diff = [&](std::size_t n, double hn, std::size_t m, double hm) {
    work.points[n] += hn;
    work.points[m] += hm;
    const double d = action_difference(gen, c, work, std::min(n, m), std::max(n, m));
    work.points[n] = c.points[n];
    work.points[m] = c.points[m];
    return d;
  };
  for (std::size_t n = 1; n <= last; ++n) {
    const double second = (shifted_diff(n, h, n, 0.0) + shifted_diff(n, -h, n, 0.0)) / (h * h);
    worst = std::max(worst, std::abs(second + H.diagonal[n - 1]));
    for (std::size_t m = n + 1; m <= std::min(last, n + 2); ++m) {
      const double mixed = (shifted_diff(n, h, m, h) - shifted_diff(n, h, m, -h) - shifted_diff(n, -h, m, h) +
                            shifted_diff(n, -h, m, -h)) /
                           (4.0 * h * h);
      const double expected = m == n + 1 ? -1.0 : 0.0;
      worst = std::max(worst, std::abs(mixed - expected));
    }
  }
  out.hess_err = worst / scale;
  return out;
}

double graph_distance(const TwistModel& model, const Configuration& c) {
  double worst = 0.0;
  for (std::size_t n = 1; n < c.size(); ++n) {
    const double r = c.points[n] - c.points[n - 1];
    worst = std::max(worst, std::abs(r - model.gamma(c.points[n])));
  }
  return worst;
}

}  // namespace amspec
