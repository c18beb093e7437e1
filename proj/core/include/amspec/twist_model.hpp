#pragma once

#include "amspec/circle_diffeo.hpp"
#include "amspec/continued_fraction.hpp"
#include "amspec/fourier_series.hpp"

namespace amspec {

struct ModelResiduals {
  double invariance = 0.0;           ///< max |f - (gamma o g - gamma)|
  double mean_f = 0.0;               ///< |mean of f|
  double g_consistency = 0.0;        ///< phi r_alpha phi^-1 versus I + gamma + f
  double derivative_identity = 0.0;  ///< max |g' (1 - gamma' o g) - 1|
};

/// Twist map psi_f together with its certified invariant graph of gamma,
/// built from a frequency and a conjugacy phi (g = phi r_alpha phi^-1).
struct TwistModel {
  Frequency alpha;
  CircleDiffeo phi;
  FourierSeries f;     ///< zero-mean force
  OffsetSeries gamma;  ///< invariant graph, mean kept separately
  OffsetSeries V;      ///< potential -f' o phi - 2 over the rotation
  int modes = kDefaultModes;
  int grid = 2048;
  double strip_h0 = 0.0;  ///< analyticity width fitted from V's coefficient decay
  ModelResiduals residuals;

  /// g(x) = x + gamma(x) + f(x), the fitted circle map on the curve.
  double g(double x) const { return x + gamma(x) + f.eval(x); }
  double g_derivative(double x) const { return 1.0 + gamma.eval_derivative(x) + f.eval_derivative(x); }
};

struct ConstructOptions {
  int modes = kDefaultModes;
  int grid = 2048;               ///< raised to 4 * modes when smaller
  double tolerance = 1e-9;       ///< certification threshold for every residual
  bool allow_uncertified = false;
};

/// Forward construction: gamma = I - phi r_alpha^-1 phi^-1 and
/// f = phi r_alpha phi^-1 - 2 I + phi r_alpha^-1 phi^-1, evaluated on lifts.
/// Throws InvarianceCertificationFailed when a residual exceeds tolerance.
TwistModel construct_from_conjugacy(const Frequency& alpha, const CircleDiffeo& phi, ConstructOptions opts = {});

/// max over a staggered grid of |gamma(x) + f(x) - gamma(x + gamma(x) + f(x))|.
double invariance_residual(const FourierSeries& f, double gamma_mean, const FourierSeries& gamma0, int grid = 4096);

struct InducedMap {
  CircleDiffeo g;              ///< fitted from phi r_alpha phi^-1
  double disagreement = 0.0;   ///< sup |phi r_alpha phi^-1 - (I + gamma + f)|
};

/// Throws ConsistencyFailure when the two constructions differ by more than tol.
InducedMap induced_circle_map(const TwistModel& model, double tol = 1e-9);

/// gamma = I - g^-1 from the circle map on the curve.
OffsetSeries gamma_from_g(const CircleDiffeo& g, int modes = kDefaultModes);

/// Rebuilds residuals and h0 from the stored series (used after loading).
void recertify(TwistModel& model);

}  // namespace amspec
