#pragma once

#include <utility>
#include <vector>

#include "amspec/cocycle.hpp"
#include "amspec/fourier_series.hpp"
#include "amspec/twist_model.hpp"

namespace amspec {

/// Dirichlet section of u -> u_{k+1} + u_{k-1} + diag_k u_k.
struct TridiagonalOperator {
  std::vector<double> diagonal;

  std::size_t size() const { return diagonal.size(); }
  std::vector<double> apply(const std::vector<double>& u) const;
  double quadratic_form(const std::vector<double>& u) const;
  std::vector<double> eigenvalues() const;  ///< ascending
  /// Number of eigenvalues strictly below e (Sturm sequence count).
  std::size_t count_below(double e) const;
};

/// diag_k = V(x0 + k alpha), k = 0..n-1.
TridiagonalOperator quasi_periodic_section(const OffsetSeries& V, double alpha, double x0, int n);

struct SpectralReport {
  std::vector<double> eigenvalues;
  std::vector<std::pair<double, double>> ids_samples;  ///< (E, N(E)) at the eigenvalues
  double top_eigenvalue = 0.0;
  int section_size = 0;
  double phase = 0.0;
};

SpectralReport finite_section_eigs(const OffsetSeries& V, double alpha, double x0, int n);

struct EdgeProbe {
  std::vector<int> sizes;
  std::vector<double> top;       ///< top Dirichlet eigenvalue per size
  std::vector<double> rayleigh;  ///< Rayleigh quotient of the windowed Bloch wave (lower bound)
  double fitted_c = 0.0;         ///< max over sizes of -top * n^2
};

/// Bloch wave u_k = phi'(x0 + k alpha) w((k+1)/(n+1)), w raised cosine.
EdgeProbe edge_probe(const TwistModel& model, const std::vector<int>& sizes, double x0 = 0.0);

enum class IdsMethod { Counting, Rotation };

struct IdsOptions {
  int section_size = 2000;
  long rotation_iterates = 100000;
};

/// Counting: (#eigenvalues <= E) / n. Rotation: 1 - 2 rho(S_E^V).
double ids_estimate(const OffsetSeries& V, double alpha, double x0, double energy, IdsMethod method,
                    IdsOptions opts = {});

struct IdsComparison {
  double counting = 0.0;
  double rotation = 0.0;
  bool method_disagreement = false;  ///< |counting - rotation| > 0.02
};

IdsComparison compare_ids(const OffsetSeries& V, double alpha, double x0, double energy, IdsOptions opts = {});

/// Coefficient vector indexed k = -K..K (size 2K+1).
using DualVector = std::vector<cplx>;

/// (H^ u)_n = sum_k v_{n-k} u_k + 2 cos(2 pi (x0 + n alpha)) u_n on the full
/// support [-(K+N), K+N] of the result. Throws WindowTooSmall when V's stored
/// modes do not reach its decay floor.
DualVector dual_apply(const OffsetSeries& V, double alpha, double x0, const DualVector& u);

double l2_norm(const DualVector& u);

struct DualCheck {
  double residual = 0.0;            ///< ||H^ phi'^|| / ||phi'^||
  double decay_rate = 0.0;          ///< slope of log|phi'^_k| against |k|
  double potential_identity = 0.0;  ///< sup |V + (phi'(x+alpha) + phi'(x-alpha)) / phi'(x)|
};

DualCheck dual_eigencheck(const TwistModel& model);

struct ResonanceReport {
  double epsilon0 = 0.0;
  std::vector<long> resonances;  ///< |k| strictly increasing; +k wins an exact tie with -k
  double phase = 0.0;
  long bound = 0;
};

/// k with |2 x0 - k alpha|_T <= exp(-eps0 |k|) and minimal over |l| <= |k|.
ResonanceReport resonance_scan(double x0, double alpha, double epsilon0, long bound);

/// eps * sup_{0<=k<=ceil(1/eps)} sup_x ||A_k(x)||^2, without the universal constant.
double spectral_measure_factor(const MatrixCocycle& c, double eps, int phases = 64);
double spectral_measure_bound(const TwistModel& model, double energy, double eps, int phases = 64);

struct HomogeneityPoint {
  double energy = 0.0;
  double eps = 0.0;
  double fraction = 0.0;
};

/// Fraction of an eps-net of (E - eps, E + eps) within 2/n of an eigenvalue,
/// for section eigenvalues E in (-window, 0). Empirical curve only.
std::vector<HomogeneityPoint> homogeneity_probe(const TwistModel& model, int n, double window,
                                                const std::vector<double>& eps_values, int max_energies = 16);

}  // namespace amspec
