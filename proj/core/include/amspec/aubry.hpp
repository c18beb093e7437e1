#pragma once

#include <vector>

#include "amspec/fourier_series.hpp"
#include "amspec/spectral.hpp"
#include "amspec/twist.hpp"
#include "amspec/twist_model.hpp"

namespace amspec {

/// Rotation number p/q with drift a; configurations satisfy x_{n+q} = x_n + p.
struct PeriodicOrbitSpec {
  long p = 0;
  long q = 1;
  double a = 0.0;

  /// Throws InvalidArgument unless q > 0 and gcd(p, q) = 1.
  void validate() const;
};

struct MinimizeOptions {
  double tol = 1e-10;            ///< sup-norm of the Euler-Lagrange residual
  double hessian_slack = 1e-10;  ///< allowed top eigenvalue of the periodic H
  int max_iter = 200;            ///< Newton iterations per start
  int descent_steps = 400;       ///< gradient steps before Newton
  int max_starts = 16;
};

struct PeriodicMinimizer {
  Configuration config;        ///< x_0 .. x_q, with x_q = x_0 + p
  double action = 0.0;         ///< sum of h(x_n, x_{n+1}) over one period
  double residual = 0.0;       ///< sup-norm of the periodic Euler-Lagrange residual
  double top_eigenvalue = 0.0; ///< of the periodic tridiagonal H with V_0 = -f' - 2
  double mean_r = 0.0;         ///< empirical mean of r_n = x_n - x_{n-1}
  int start_index = 0;         ///< which deterministic start succeeded
  int iterations = 0;
};

/// Damped Newton on the periodic residual map with gradient-descent
/// prelude, from starts x_n = x0 + n p/q with x0 = k/(2q). Throws
/// NoConvergence when no start reaches tol and SaddlePoint when every
/// converged start fails the Hessian test.
PeriodicMinimizer minimize_periodic(const FourierSeries& f, const PeriodicOrbitSpec& spec, MinimizeOptions opts = {});

/// Repeats one period `periods` times: points x_0 .. x_{q*periods}.
Configuration unroll(const PeriodicMinimizer& m, const PeriodicOrbitSpec& spec, int periods);

/// diag_n = -f'(phases_n) - 2.
TridiagonalOperator build_schrodinger_sequence(const FourierSeries& f, const std::vector<double>& phases);

/// Dirichlet operator along the interior points of a configuration.
TridiagonalOperator configuration_hessian(const FourierSeries& f, const Configuration& c);

struct DerivativeCheck {
  double grad_err = 0.0;
  double hess_err = 0.0;
};

/// Central differences of the segment action over interior points, compared
/// with the gradient -residual and the Hessian -H. Errors are absolute
/// differences divided by max(1, sup of the analytic quantity).
DerivativeCheck hessian_consistency_check(const FourierSeries& f, double a, const Configuration& c, double h);

/// Gradient half of the check alone; valid for any configuration.
double gradient_check(const FourierSeries& f, double a, const Configuration& c, double h);

/// max over n >= 1 of |x_n - x_{n-1} - gamma(x_n)|: distance of the states
/// (x_n, r_n) to the invariant graph, measured along r.
double graph_distance(const TwistModel& model, const Configuration& c);

}  // namespace amspec
