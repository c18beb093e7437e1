#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "amspec/error.hpp"
#include "amspec/spectral.hpp"
#include "test_support.hpp"

namespace amspec {
namespace {

using testing::edge_model;
using testing::free_model;

double torus_dist(double x) { return std::abs(x - std::round(x)); }

TEST(Tridiagonal, ApplyAndQuadraticForm) {
  const TridiagonalOperator op{{-2.0, -1.0, -3.0}};
  const auto out = op.apply({1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(out[0], -2.0 + 2.0);
  EXPECT_DOUBLE_EQ(out[1], 1.0 - 2.0 + 3.0);
  EXPECT_DOUBLE_EQ(out[2], 2.0 - 9.0);
  EXPECT_DOUBLE_EQ(op.quadratic_form({1.0, 2.0, 3.0}), 1.0 * 0.0 + 2.0 * 2.0 + 3.0 * -7.0);
}

TEST(Tridiagonal, SturmCountMatchesEigenvalues) {
  const TwistModel& m = edge_model();
  const TridiagonalOperator op = quasi_periodic_section(m.V, m.alpha.value, 0.2, 300);
  const auto eig = op.eigenvalues();
  for (double e : {-5.0, -3.0, -1.0, -0.1, 0.0, 1.0}) {
    const auto expected = std::count_if(eig.begin(), eig.end(), [&](double l) { return l < e; });
    EXPECT_EQ(op.count_below(e), static_cast<std::size_t>(expected)) << e;
  }
}

TEST(FiniteSection, FreeClosedForm) {
  const TwistModel& m = free_model();
  for (int n : {2, 17, 100}) {
    const SpectralReport rep = finite_section_eigs(m.V, m.alpha.value, 0.0, n);
    ASSERT_EQ(rep.eigenvalues.size(), static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) {
      EXPECT_NEAR(rep.eigenvalues[n - j], 2.0 * std::cos(j * M_PI / (n + 1)) - 2.0, 1e-12);
    }
  }
  const SpectralReport rep = finite_section_eigs(m.V, m.alpha.value, 0.0, 100);
  EXPECT_NEAR(rep.top_eigenvalue, -9.67e-4, 1e-6);
}

TEST(FiniteSection, EdgeModelIsNonpositive) {
  const TwistModel& m = edge_model();
  for (int n : {100, 500, 2000}) {
    for (double x0 : {0.0, 0.37}) {
      EXPECT_LE(finite_section_eigs(m.V, m.alpha.value, x0, n).top_eigenvalue, 1e-10) << n << " " << x0;
    }
  }
}

TEST(EdgeProbe, FreeModelFollowsInverseSquare) {
  const EdgeProbe p = edge_probe(free_model(), {100, 627});
  EXPECT_NEAR(p.top[0], -9.7e-4, 1e-5);
  EXPECT_NEAR(p.top[1], -2.5e-5, 1e-6);
  EXPECT_NEAR(p.fitted_c, M_PI * M_PI, 0.5);
  for (std::size_t i = 0; i < p.sizes.size(); ++i) EXPECT_LE(p.rayleigh[i], p.top[i] + 1e-15);
}

TEST(EdgeProbe, EdgeModelApproachesZero) {
  const EdgeProbe p = edge_probe(edge_model(), {250, 500, 1000, 2000});
  for (std::size_t i = 0; i < p.sizes.size(); ++i) {
    EXPECT_LE(p.top[i], 1e-10);
    EXPECT_GT(p.top[i], -10.0 / (double(p.sizes[i]) * p.sizes[i]));
    EXPECT_LE(p.rayleigh[i], p.top[i] + 1e-12);
    if (i > 0) EXPECT_GT(p.top[i], p.top[i - 1]);
  }
}

TEST(Ids, FreeBandValues) {
  const TwistModel& m = free_model();
  IdsOptions opts;
  opts.section_size = 1000;
  for (IdsMethod method : {IdsMethod::Counting, IdsMethod::Rotation}) {
    EXPECT_NEAR(ids_estimate(m.V, m.alpha.value, 0.0, -2.0, method, opts), 0.5, 2e-3);
    EXPECT_NEAR(ids_estimate(m.V, m.alpha.value, 0.0, 0.0, method, opts), 1.0, 2e-3);
    EXPECT_NEAR(ids_estimate(m.V, m.alpha.value, 0.0, -4.0, method, opts), 0.0, 2e-3);
  }
}

TEST(Ids, EdgeModelMethodsAgreeAndAreMonotone) {
  const TwistModel& m = edge_model();
  const IdsComparison cmp = compare_ids(m.V, m.alpha.value, 0.0, -1.0);
  EXPECT_LT(std::abs(cmp.counting - cmp.rotation), 0.01);
  EXPECT_FALSE(cmp.method_disagreement);

  IdsOptions opts;
  opts.section_size = 500;
  const double v_sup = (m.V.combined() - FourierSeries::constant(-2.0)).sup_norm(1024);
  EXPECT_EQ(ids_estimate(m.V, m.alpha.value, 0.0, -4.0 - 2.0 * v_sup - 0.01, IdsMethod::Counting, opts), 0.0);
  EXPECT_EQ(ids_estimate(m.V, m.alpha.value, 0.0, 0.01, IdsMethod::Counting, opts), 1.0);
  double prev = 0.0;
  for (double e = -5.0; e <= 0.5; e += 0.1) {
    const double n = ids_estimate(m.V, m.alpha.value, 0.0, e, IdsMethod::Counting, opts);
    EXPECT_GE(n, prev);
    prev = n;
  }
}

TEST(Dual, TrivialInputs) {
  const TwistModel& m = free_model();
  const DualVector out = dual_apply(m.V, m.alpha.value, 0.0, DualVector{1.0});
  for (const cplx& c : out) EXPECT_LT(std::abs(c), 1e-15);
  const DualVector zero = dual_apply(edge_model().V, m.alpha.value, 0.3, DualVector(21, 0.0));
  EXPECT_EQ(l2_norm(zero), 0.0);
}

TEST(Dual, ConvolutionMatchesDirectSum) {
  const TwistModel& m = edge_model();
  const FourierSeries v = m.V.combined().trimmed(1e-18);
  const DualVector u{cplx(0.3, 0.1), cplx(1.0, 0.0), cplx(-0.2, 0.5)};
  const double x0 = 0.13;
  const DualVector out = dual_apply(m.V, m.alpha.value, x0, u);
  const int half = static_cast<int>(out.size() / 2);
  for (int n = -half; n <= half; ++n) {
    cplx expected = 0.0;
    for (int k = -1; k <= 1; ++k) expected += v.coeff(n - k) * u[k + 1];
    if (std::abs(n) <= 1) expected += 2.0 * std::cos(kTwoPi * (x0 + n * m.alpha.value)) * u[n + 1];
    EXPECT_LT(std::abs(out[n + half] - expected), 1e-13) << n;
  }
}

TEST(Dual, EdgeModelEigenvector) {
  const DualCheck dc = dual_eigencheck(edge_model());
  EXPECT_LT(dc.residual, 1e-8);
  EXPECT_LT(dc.decay_rate, -kTwoPi * 0.1);
  EXPECT_LT(dc.potential_identity, 1e-9);
}

TEST(Resonances, SimpleCases) {
  const double alpha = Frequency::golden().value;
  const ResonanceReport at_zero = resonance_scan(0.0, alpha, 1.0, 100);
  ASSERT_FALSE(at_zero.resonances.empty());
  EXPECT_EQ(at_zero.resonances.front(), 0);
  const ResonanceReport half = resonance_scan(alpha / 2, alpha, 1.0, 100);
  EXPECT_NE(std::find(half.resonances.begin(), half.resonances.end(), 1), half.resonances.end());
}

std::vector<long> brute_force_resonances(double x0, double alpha, double eps0, long bound) {
  std::vector<long> out;
  for (long k = 0; k <= bound; ++k) {
    for (long s : {k, -k}) {
      const double d = torus_dist(2 * x0 - s * alpha);
      if (d > std::exp(-eps0 * std::abs(s))) continue;
      bool minimal = true;
      for (long l = -k; l <= k && minimal; ++l) {
        if (torus_dist(2 * x0 - l * alpha) < d) minimal = false;
      }
      if (minimal && (out.empty() || std::abs(out.back()) < k)) out.push_back(s);
      if (k == 0) break;
    }
  }
  return out;
}

TEST(Resonances, MatchExhaustiveScan) {
  const double alpha = Frequency::golden().value;
  for (double x0 : {0.17, 0.0, 0.4}) {
    const ResonanceReport rep = resonance_scan(x0, alpha, 1.0, 10000);
    EXPECT_EQ(rep.resonances, brute_force_resonances(x0, alpha, 1.0, 10000)) << x0;
    for (std::size_t i = 1; i < rep.resonances.size(); ++i) {
      EXPECT_GT(std::abs(rep.resonances[i]), std::abs(rep.resonances[i - 1]));
    }
  }
}

TEST(Resonances, ReflectionSymmetry) {
  const double alpha = Frequency::golden().value;
  for (double x0 : {0.17, 0.31, 0.9}) {
    const auto a = resonance_scan(x0, alpha, 0.5, 5000).resonances;
    const auto b = resonance_scan(1.0 - x0, alpha, 0.5, 5000).resonances;
    ASSERT_EQ(a.size(), b.size()) << x0;
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], -b[i]) << x0;
  }
}

TEST(MeasureFactor, BoundedConstantCocycle) {
  MatrixCocycle c;
  c.alpha = Frequency::golden().value;
  c.matrix = MatrixSeries::constant(Mat2{0.0, -1.0, 1.0, 0.0});
  EXPECT_NEAR(spectral_measure_factor(c, 0.01), 0.01, 1e-15);
  EXPECT_NEAR(spectral_measure_bound(free_model(), -2.0, 0.01), 0.01, 1e-12);
}

TEST(MeasureFactor, FreeEllipticProducts) {
  const double eps = 0.01, e = -1.0;
  const Mat2 s{e + 2.0, -1.0, 1.0, 0.0};
  Mat2 p = Mat2::identity();
  double sup = 1.0;
  for (int k = 1; k <= 100; ++k) {
    p = s * p;
    sup = std::max(sup, op_norm(p));
  }
  EXPECT_NEAR(spectral_measure_bound(free_model(), e, eps), eps * sup * sup, 1e-12);
}

TEST(MeasureFactor, EdgeModelWithinReductionBound) {
  const TwistModel& m = edge_model();
  const ReductionResult red = parabolic_reduce(m);
  const double eps = 0.01;
  const double z2 = red.z_sup_norm * red.z_sup_norm;
  const double bound = eps * std::pow(z2 * (1.0 + std::abs(red.nu0) / eps), 2);
  const double factor = spectral_measure_bound(m, 0.0, eps);
  EXPECT_GT(factor, 0.0);
  EXPECT_LE(factor, bound);
}

TEST(Homogeneity, ProbeReturnsFractions) {
  const auto pts = homogeneity_probe(edge_model(), 400, 0.5, {0.01, 0.02}, 4);
  ASSERT_FALSE(pts.empty());
  for (const HomogeneityPoint& p : pts) {
    EXPECT_LT(p.energy, 0.0);
    EXPECT_GT(p.energy, -0.5);
    EXPECT_GE(p.fraction, 0.0);
    EXPECT_LE(p.fraction, 1.0);
  }
}

}  // namespace
}  // namespace amspec
