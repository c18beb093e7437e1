#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "amspec/circle_diffeo.hpp"
#include "amspec/fourier_series.hpp"
#include "amspec/mat2.hpp"
#include "amspec/twist_model.hpp"

namespace amspec {

/// Matrix-valued periodic function with one Fourier series per entry.
struct MatrixSeries {
  std::array<FourierSeries, 4> entries;  ///< a, b, c, d

  Mat2 operator()(double x) const {
    return {entries[0].eval(x), entries[1].eval(x), entries[2].eval(x), entries[3].eval(x)};
  }
  CMat2 operator()(cplx z) const {
    return {entries[0].eval_complex(z), entries[1].eval_complex(z), entries[2].eval_complex(z),
            entries[3].eval_complex(z)};
  }

  static MatrixSeries constant(const Mat2& m);
  static MatrixSeries fit(const std::function<Mat2(double)>& fn, int modes, int grid);
  /// Smallest analyticity width over the non-constant entries.
  double strip_width() const;
};

/// Linear cocycle (base, A) acting by (x, v) -> (base(x), A(x) v). The base is
/// the rotation by alpha unless base_map is set.
struct MatrixCocycle {
  double alpha = 0.0;
  std::optional<CircleDiffeo> base_map;
  MatrixSeries matrix;

  Mat2 at(double x) const { return matrix(x); }
  CMat2 at(cplx z) const { return matrix(z); }
  double advance(double x) const;
  cplx advance(cplx z) const;

  /// max |det A - 1| on a grid.
  double sl2_defect(int grid = 2048) const;
};

/// Twist-map differential [[1 + f', 1], [f', 1]].
Mat2 twist_jacobian(const FourierSeries& f, double x);

/// Derivative cocycle along the invariant curve, over the circle map g.
MatrixCocycle derivative_cocycle(const TwistModel& model);

/// S_E^V = [[E - V, -1], [1, 0]] over the rotation by alpha.
MatrixCocycle schrodinger_cocycle(const OffsetSeries& V, double energy, double alpha);

inline const Mat2 kConjugatorM{1.0, 0.0, 1.0, -1.0};

struct Iterates {
  std::vector<Mat2> products;  ///< A_1, ..., A_n at the start phase
  bool overflow = false;       ///< stopped once a norm passed 1e150
};

/// A_k = A(x0 + (k-1) alpha) ... A(x0).
Iterates cocycle_iterates(const MatrixCocycle& c, long n, double x0);

/// sup over a phase grid of ||A_k||, k = 0..n (entry 0 is the identity).
std::vector<double> sup_norm_growth(const MatrixCocycle& c, long n, int phases = 64);

struct LyapunovOptions {
  int phases = 8;
  int renormalize_every = 32;
};

/// (1/n) * mean over phases of log ||A_n(x + i delta)||.
/// Throws StripTooWide when |delta| reaches the entries' fitted strip width.
double lyapunov_exponent(const MatrixCocycle& c, long n, double delta = 0.0, LyapunovOptions opts = {});

/// Fibered rotation number from the lifted projective action; in [0, 1/2]
/// for Schroedinger cocycles. Throws WindingNonzero when the first column
/// winds around the origin.
double fibered_rotation_number(const MatrixCocycle& c, long n, double x0 = 0.0);

/// A -> B(base(x))^-1 A(x) B(x), refitted with `modes` modes.
MatrixCocycle conjugate_cocycle(const MatrixCocycle& c, const std::function<Mat2(double)>& B, int modes = 64,
                                int grid = 512);

struct CohomologicalSolution {
  FourierSeries mu;
  double residual = 0.0;  ///< sup |mu(x + alpha) - mu(x) - nu(x)| on a grid
};

/// Solves mu(x + alpha) - mu(x) = nu(x) for zero-mean nu, with mu zero-mean.
/// divisor_floor < 0 selects the default 1e-12 * ||nu||_1.
CohomologicalSolution solve_cohomological(const FourierSeries& nu, double alpha, double divisor_floor = -1.0);

struct ReductionResult {
  std::function<Mat2(double)> Z;  ///< chain Z = M Z1(phi) diag(phi', -1/phi') [[1, mu], [0, 1]]
  double nu0 = 0.0;
  double residual = 0.0;          ///< sup ||Z(x+alpha)^-1 S_0^V(x) Z(x) - B0||
  FourierSeries mu;
  FourierSeries nu;
  double formula_mismatch = 0.0;  ///< chain Z versus the closed-form matrix
  double z_sup_norm = 0.0;
  double z_min_det = 0.0, z_max_det = 0.0;
  double z11_min = 0.0;           ///< min of the (1,1) entry, phi' > 0

  Mat2 B0() const { return {1.0, nu0, 0.0, 1.0}; }
};

/// Conjugates S_0^V to the constant parabolic B0 = [[1, nu0], [0, 1]].
/// Throws ResidualTooLarge when the residual exceeds max_residual.
ReductionResult parabolic_reduce(const TwistModel& model, double max_residual = 1e-8);

/// Closed form [[phi', mu phi'], [phi'(x-alpha), 1/phi' + mu phi'(x-alpha)]].
Mat2 reduction_closed_form(const TwistModel& model, const FourierSeries& mu, double x);

struct BlochCheck {
  double section = 0.0;  ///< sup |S_0^V(x) U(x) - U(x+alpha)|, U = (phi'(x), phi'(x-alpha))
  double scalar = 0.0;   ///< sup |V phi' + phi'(x+alpha) + phi'(x-alpha)|
};

BlochCheck bloch_section_check(const TwistModel& model);

struct Q0Normalization {
  Mat2 Q0;
  double check = 0.0;  ///< ||Q0^-1 B0 Q0 - [[2, -1], [1, 0]]||
};

/// Throws PositiveNu0 unless nu0 < 0.
Q0Normalization q0_normalize(double nu0);

struct PerturbationSymbol {
  double eps = 0.0;
  double sup_norm = 0.0;  ///< sup over the grid of ||P1(x)||
  Mat2 mean;              ///< grid average of P1
};

/// P1 = (Z0(x+alpha)^-1 S_eps^V(x) Z0(x) - [[2, -1], [1, 0]]) / eps with
/// Z0 = Z Q0, the first-order term of the energy perturbation at the edge.
/// Throws PositiveNu0 unless the reduction has nu0 < 0.
PerturbationSymbol perturbation_symbol(const TwistModel& model, const ReductionResult& red, double eps,
                                       int grid = 1024);

enum class UhVerdict { Hyperbolic, NotHyperbolic, Inconclusive };

struct UhResult {
  UhVerdict verdict = UhVerdict::Inconclusive;
  double margin = 0.0;
  bool hyperbolic() const { return verdict == UhVerdict::Hyperbolic; }
};

const char* to_string(UhVerdict v);

struct UhOptions {
  int phases = 32;
};

/// Exponential-dichotomy test. margin = min over phases of
/// (log ||A_n(x)|| - 2 log n) / n: positive for uniform exponential growth,
/// negative once n exceeds the constant of any at most linear growth.
/// |margin| <= 1/n is reported as Inconclusive.
UhResult uh_test(const MatrixCocycle& c, long n, UhOptions opts = {});

}  // namespace amspec
