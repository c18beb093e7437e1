#include <cmath>

#include <gtest/gtest.h>

#include "amspec/cocycle.hpp"
#include "amspec/error.hpp"
#include "test_support.hpp"

namespace amspec {
namespace {

using testing::edge_model;
using testing::free_model;

double mat_dist(const Mat2& x, const Mat2& y) { return max_abs(x - y); }

MatrixCocycle constant_cocycle(const Mat2& m, double alpha = Frequency::golden().value) {
  MatrixCocycle c;
  c.alpha = alpha;
  c.matrix = MatrixSeries::constant(m);
  return c;
}

template <class Fn>
void expect_error(ErrorCode code, Fn&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(Schrodinger, FreeAtZeroIsConstant) {
  const MatrixCocycle c = schrodinger_cocycle(free_model().V, 0.0, free_model().alpha.value);
  for (double x : {0.0, 0.4}) EXPECT_LT(mat_dist(c.at(x), {2.0, -1.0, 1.0, 0.0}), 1e-15);
}

TEST(Schrodinger, DeterminantIsOne) {
  const TwistModel& m = edge_model();
  for (double e : {-3.0, -0.5, 0.0, 0.7}) EXPECT_LT(schrodinger_cocycle(m.V, e, m.alpha.value).sl2_defect(), 1e-12);
}

TEST(Schrodinger, ConjugateOfTwistJacobian) {
  const TwistModel& m = edge_model();
  const MatrixCocycle s0 = schrodinger_cocycle(m.V, 0.0, m.alpha.value);
  const FourierSeries df = m.f.derivative();
  for (double x : {0.0, 0.21, 0.5, 0.77}) {
    const Mat2 conj = kConjugatorM * twist_jacobian(m.f, x) * kConjugatorM;
    EXPECT_LT(mat_dist(conj, Mat2{df(x) + 2.0, -1.0, 1.0, 0.0}), 1e-12);
    // V is V_0 = -f' - 2 read along phi.
    const double y = m.phi(x);
    EXPECT_LT(mat_dist(kConjugatorM * twist_jacobian(m.f, y) * kConjugatorM, s0.at(x)), 1e-9);
  }
}

TEST(DerivativeCocycle, FreeIsShear) {
  const MatrixCocycle d = derivative_cocycle(free_model());
  for (double x : {0.0, 0.6}) EXPECT_LT(mat_dist(d.at(x), {1.0, 1.0, 0.0, 1.0}), 1e-14);
}

TEST(DerivativeCocycle, TangentSectionIsInvariant) {
  const TwistModel& m = edge_model();
  const MatrixCocycle d = derivative_cocycle(m);
  for (double x : {0.1, 0.35, 0.9}) {
    const Vec2 t{1.0, m.gamma.eval_derivative(x)};
    const Vec2 image = d.at(x) * t;
    const double gx = m.g(x);
    EXPECT_NEAR(image.x, m.g_derivative(x), 1e-9);
    EXPECT_NEAR(image.y, m.g_derivative(x) * m.gamma.eval_derivative(gx), 1e-9);
    EXPECT_NEAR(std::remainder(d.advance(x) - gx, 1.0), 0.0, 1e-9);
  }
}

TEST(ConjugateCocycle, IdentityLeavesCocycleUnchanged) {
  const TwistModel& m = edge_model();
  const MatrixCocycle s = schrodinger_cocycle(m.V, -0.5, m.alpha.value);
  const MatrixCocycle same = conjugate_cocycle(s, [](double) { return Mat2::identity(); }, 64, 512);
  for (double x : {0.0, 0.3, 0.71}) EXPECT_LT(mat_dist(same.at(x), s.at(x)), 1e-12);
}

TEST(ConjugateCocycle, TangentFrameTriangularizes) {
  const TwistModel& m = edge_model();
  const auto z1 = [&](double x) { return Mat2{1.0, 0.0, m.gamma.eval_derivative(x), 1.0}; };
  const MatrixCocycle t = conjugate_cocycle(derivative_cocycle(m), z1, 128, 1024);
  for (double x : {0.0, 0.15, 0.62}) {
    const double gp = m.g_derivative(x);
    EXPECT_LT(mat_dist(t.at(x), {gp, 1.0, 0.0, 1.0 / gp}), 1e-9);
  }
}

TEST(ConjugateCocycle, LyapunovExponentIsInvariant) {
  const TwistModel& m = edge_model();
  const MatrixCocycle s = schrodinger_cocycle(m.V, 1.0, m.alpha.value);
  const auto b = [](double x) { return Mat2{1.0, 0.2 * std::cos(kTwoPi * x), 0.0, 1.0}; };
  const MatrixCocycle sb = conjugate_cocycle(s, b, 64, 512);
  const long n = 200000;
  EXPECT_NEAR(lyapunov_exponent(sb, n), lyapunov_exponent(s, n), 2e-6);
}

TEST(Iterates, ParabolicGrowsLinearly) {
  const double nu0 = -0.7;
  const Iterates it = cocycle_iterates(constant_cocycle({1.0, nu0, 0.0, 1.0}), 50, 0.0);
  ASSERT_EQ(it.products.size(), 50u);
  for (int k = 1; k <= 50; ++k) EXPECT_LT(mat_dist(it.products[k - 1], {1.0, k * nu0, 0.0, 1.0}), 1e-12);
  for (const Mat2& p : cocycle_iterates(constant_cocycle(Mat2::identity()), 20, 0.3).products) {
    EXPECT_EQ(mat_dist(p, Mat2::identity()), 0.0);
  }
}

TEST(Iterates, OverflowIsFlagged) {
  const Iterates it = cocycle_iterates(constant_cocycle(Mat2::diag(1e10, 1e-10)), 100, 0.0);
  EXPECT_TRUE(it.overflow);
  EXPECT_LT(it.products.size(), 100u);
}

TEST(Iterates, BoundedByReduction) {
  const TwistModel& m = edge_model();
  const ReductionResult red = parabolic_reduce(m);
  const long n = 10000;
  const std::vector<double> growth = sup_norm_growth(schrodinger_cocycle(m.V, 0.0, m.alpha.value), n, 16);
  ASSERT_EQ(growth.size(), static_cast<std::size_t>(n) + 1);
  const double z2 = red.z_sup_norm * red.z_sup_norm;
  for (long k = 0; k <= n; k += 97) EXPECT_LE(growth[k], z2 * (1.0 + k * std::abs(red.nu0)) * (1 + 1e-9)) << k;
}

TEST(Lyapunov, DiagonalAndParabolic) {
  EXPECT_NEAR(lyapunov_exponent(constant_cocycle(Mat2::diag(2.0, 0.5)), 1000), std::log(2.0), 1e-10);
  const long n = 100000;
  EXPECT_LE(lyapunov_exponent(constant_cocycle({1.0, -1.0, 0.0, 1.0}), n), 2 * std::log(double(n)) / n);
}

TEST(Lyapunov, PositiveAboveSpectrum) {
  const TwistModel& m = edge_model();
  EXPECT_GT(lyapunov_exponent(schrodinger_cocycle(m.V, 1.0, m.alpha.value), 20000), 0.1);
}

TEST(Lyapunov, ZeroOnStripAtEdge) {
  const TwistModel& m = edge_model();
  const MatrixCocycle s0 = schrodinger_cocycle(m.V, 0.0, m.alpha.value);
  for (double delta : {0.0, m.strip_h0 / 4, m.strip_h0 / 2}) {
    const double le = lyapunov_exponent(s0, 100000, delta);
    EXPECT_TRUE(std::isfinite(le)) << delta;
    EXPECT_LT(le, 5e-3) << delta;
  }
  expect_error(ErrorCode::StripTooWide, [&] { lyapunov_exponent(s0, 1000, 1.01 * m.strip_h0); });
}

TEST(Rotation, FreeClosedForm) {
  const TwistModel& m = free_model();
  for (double e : {-3.5, -3.0, -2.0, -1.0, -0.3}) {
    const double exact = std::acos((e + 2.0) / 2.0) / kTwoPi;
    EXPECT_NEAR(fibered_rotation_number(schrodinger_cocycle(m.V, e, m.alpha.value), 100000), exact, 1e-4) << e;
  }
  EXPECT_NEAR(fibered_rotation_number(schrodinger_cocycle(m.V, 0.0, m.alpha.value), 100000), 0.0, 1e-4);
}

TEST(Rotation, EdgeModelVanishesAtZeroAndIsMonotone) {
  const TwistModel& m = edge_model();
  EXPECT_NEAR(fibered_rotation_number(schrodinger_cocycle(m.V, 0.0, m.alpha.value), 100000), 0.0, 1e-4);
  double prev = 0.5;
  for (double e = -4.5; e <= 0.5; e += 0.25) {
    const double rho = fibered_rotation_number(schrodinger_cocycle(m.V, e, m.alpha.value), 20000);
    EXPECT_GE(rho, -1e-12);
    EXPECT_LE(rho, 0.5 + 1e-12);
    EXPECT_LE(rho, prev + 1e-3) << e;
    prev = rho;
  }
}

TEST(Rotation, WindingCocycleIsRejected) {
  MatrixCocycle c;
  c.alpha = Frequency::golden().value;
  c.matrix = MatrixSeries::fit(
      [](double x) {
        const double t = kTwoPi * x;
        return Mat2{std::cos(t), -std::sin(t), std::sin(t), std::cos(t)};
      },
      4, 64);
  expect_error(ErrorCode::WindingNonzero, [&] { fibered_rotation_number(c, 1000); });
}

TEST(Cohomological, OneModeClosedForm) {
  const double alpha = Frequency::golden().value;
  const CohomologicalSolution sol = solve_cohomological(FourierSeries::harmonic(1, 1.0, 0.0), alpha);
  const cplx expected = 0.5 / (std::exp(cplx(0.0, kTwoPi * alpha)) - 1.0);
  EXPECT_LT(std::abs(sol.mu.coeff(1) - expected), 1e-15);
  EXPECT_LT(sol.residual, 1e-12);
  for (double x : {0.1, 0.5}) {
    EXPECT_NEAR(sol.mu(x + alpha) - sol.mu(x), std::cos(kTwoPi * x), 1e-12);
  }
}

TEST(Cohomological, ConstantGivesZero) {
  const CohomologicalSolution sol = solve_cohomological(FourierSeries::constant(0.0, 3), 0.3819660112501051);
  EXPECT_EQ(sol.mu.l1_norm(), 0.0);
}

TEST(Cohomological, ModelNuIsSolved) {
  const TwistModel& m = edge_model();
  const ReductionResult red = parabolic_reduce(m);
  const CohomologicalSolution sol = solve_cohomological(red.nu.zero_mean(), m.alpha.value);
  EXPECT_LT(sol.residual, 1e-9);
  // nu = -1 / (phi'(x) phi'(x + alpha)) read from the conjugacy directly.
  for (double x : {0.0, 0.3, 0.8}) {
    EXPECT_NEAR(red.nu(x), -1.0 / (m.phi.derivative(x) * m.phi.derivative(x + m.alpha.value)), 1e-10);
  }
}

TEST(Reduction, FreeModelClosedForm) {
  const ReductionResult red = parabolic_reduce(free_model());
  EXPECT_EQ(red.nu0, -1.0);
  EXPECT_LT(red.residual, 1e-14);
  for (double x : {0.0, 0.5}) EXPECT_LT(mat_dist(red.Z(x), {1.0, 0.0, 1.0, 1.0}), 1e-14);
  // Hand check: Z^-1 [[2,-1],[1,0]] Z = [[1,-1],[0,1]].
  const Mat2 z{1.0, 0.0, 1.0, 1.0};
  EXPECT_LT(mat_dist(z.inverse() * Mat2{2.0, -1.0, 1.0, 0.0} * z, red.B0()), 0.0 + 1e-15);
}

TEST(Reduction, EdgeModelChainMatchesClosedForm) {
  const TwistModel& m = edge_model();
  const ReductionResult red = parabolic_reduce(m);
  EXPECT_LT(red.nu0, 0.0);
  EXPECT_LT(red.residual, 1e-8);
  EXPECT_LT(red.formula_mismatch, 1e-10);
  EXPECT_NEAR(red.z_min_det, 1.0, 1e-10);
  EXPECT_NEAR(red.z_max_det, 1.0, 1e-10);
  EXPECT_GT(red.z11_min, 0.0);
  for (double x : {0.12, 0.5, 0.83}) EXPECT_LT(mat_dist(red.Z(x), reduction_closed_form(m, red.mu, x)), 1e-10);
}

TEST(Reduction, ResidualShrinksWithModesBeforePlateau) {
  // At 128 and 256 modes both residuals are roundoff; the geometric gain
  // with mode count is visible only at small truncations.
  const CircleDiffeo phi = CircleDiffeo::from_derivative_harmonics({0.3}, {});
  ConstructOptions opts;
  opts.allow_uncertified = true;
  double prev = 1.0;
  for (int modes : {8, 12, 16}) {
    opts.modes = modes;
    opts.grid = 4 * modes;
    const TwistModel m = construct_from_conjugacy(Frequency::golden(), phi, opts);
    const double r = parabolic_reduce(m, 1.0).residual;
    EXPECT_LT(r, prev / 10) << modes;
    prev = r;
  }
}

TEST(Bloch, SectionIsInvariant) {
  const BlochCheck free = bloch_section_check(free_model());
  EXPECT_LT(free.section, 1e-15);
  EXPECT_LT(free.scalar, 1e-15);
  const BlochCheck edge = bloch_section_check(edge_model());
  EXPECT_LT(edge.section, 1e-10);
  EXPECT_LT(edge.scalar, 1e-10);
}

TEST(Q0, NormalizesParabolicMatrices) {
  const Q0Normalization one = q0_normalize(-1.0);
  EXPECT_LT(mat_dist(one.Q0, {-0.5, -0.5, 1.0, -1.0}), 1e-15);
  EXPECT_EQ(one.check, 0.0);

  const Q0Normalization four = q0_normalize(-4.0);
  EXPECT_NEAR(four.Q0.det(), 1.0, 1e-15);
  EXPECT_LT(four.check, 1e-14);
  const Mat2 direct = four.Q0.inverse() * Mat2{1.0, -4.0, 0.0, 1.0} * four.Q0;
  EXPECT_LT(mat_dist(direct, {2.0, -1.0, 1.0, 0.0}), 1e-14);

  expect_error(ErrorCode::PositiveNu0, [] { q0_normalize(0.1); });
}

TEST(PerturbationSymbol, FreeModelIsConstant) {
  const TwistModel& m = free_model();
  const ReductionResult red = parabolic_reduce(m);
  const Mat2 z0 = Mat2{1.0, 0.0, 1.0, 1.0} * q0_normalize(-1.0).Q0;
  // S_eps - S_0 = eps [[1, 0], [0, 0]] and Z0 is constant.
  const Mat2 expected = z0.inverse() * Mat2{1.0, 0.0, 0.0, 0.0} * z0;
  const PerturbationSymbol p = perturbation_symbol(m, red, 1e-3);
  EXPECT_LT(mat_dist(p.mean, expected), 1e-12);
  EXPECT_NEAR(p.sup_norm, op_norm(expected), 1e-12);
}

TEST(PerturbationSymbol, EdgeModelIsStableInEps) {
  const TwistModel& m = edge_model();
  const ReductionResult red = parabolic_reduce(m);
  const PerturbationSymbol a = perturbation_symbol(m, red, 1e-3);
  const PerturbationSymbol b = perturbation_symbol(m, red, 1e-4);
  EXPECT_TRUE(std::isfinite(a.sup_norm));
  EXPECT_LT(mat_dist(a.mean, b.mean), 1e-5 + 1e-6 * a.sup_norm);
}

TEST(UhTest, ConstantMatrices) {
  const UhResult hyp = uh_test(constant_cocycle({2.5, -1.0, 1.0, 0.0}), 1000);
  EXPECT_TRUE(hyp.hyperbolic());
  EXPECT_GT(hyp.margin, 0.0);
  const UhResult par = uh_test(constant_cocycle({1.0, -1.0, 0.0, 1.0}), 1000);
  EXPECT_EQ(par.verdict, UhVerdict::NotHyperbolic);
  EXPECT_LT(par.margin, 0.0);
  EXPECT_EQ(uh_test(constant_cocycle({0.0, -1.0, 1.0, 0.0}), 1000).verdict, UhVerdict::NotHyperbolic);
}

TEST(UhTest, EdgeModelDichotomy) {
  const TwistModel& m = edge_model();
  EXPECT_TRUE(uh_test(schrodinger_cocycle(m.V, 0.01, m.alpha.value), 10000).hyperbolic());
  EXPECT_EQ(uh_test(schrodinger_cocycle(m.V, 0.0, m.alpha.value), 10000).verdict, UhVerdict::NotHyperbolic);
}

}  // namespace
}  // namespace amspec
