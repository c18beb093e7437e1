#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace amspec {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Real 1-periodic function stored as complex coefficients c_k, k = -N..N,
/// with c_{-k} = conj(c_k).
class FourierSeries {
 public:
  FourierSeries() : coeffs_(1, cplx{0.0, 0.0}) {}
  explicit FourierSeries(int n_modes);
  /// Takes coefficients in index order k = -N..N; size must be odd.
  explicit FourierSeries(std::vector<cplx> coeffs);

  static FourierSeries constant(double value, int n_modes = 0);
  /// a*cos(2 pi k x) + b*sin(2 pi k x).
  static FourierSeries harmonic(int k, double cos_amp, double sin_amp, int n_modes = -1);

  int n_modes() const { return static_cast<int>(coeffs_.size() / 2); }
  const std::vector<cplx>& coefficients() const { return coeffs_; }

  cplx coeff(int k) const;
  /// Sets c_k and c_{-k} = conj(c_k) together.
  void set_coeff(int k, cplx value);

  double mean() const { return coeffs_[n_modes()].real(); }

  double operator()(double x) const { return eval(x); }
  double eval(double x) const;
  double eval_derivative(double x) const;
  /// Holomorphic extension: sum c_k exp(2 pi i k z).
  cplx eval_complex(cplx z) const;

  /// Samples on the uniform grid x_j = j / m.
  std::vector<double> sample(int m) const;

  FourierSeries derivative() const;
  /// Zero-mean antiderivative of the zero-mean part.
  FourierSeries antiderivative() const;
  FourierSeries zero_mean() const;
  /// x -> f(x + s).
  FourierSeries shifted(double s) const;
  FourierSeries resized(int n_modes) const;
  /// Drops trailing modes whose magnitude is below rel_tol * l1_norm().
  FourierSeries trimmed(double rel_tol = 1e-18) const;

  double l1_norm() const;
  double sup_norm(int grid) const;
  /// Largest violation of c_{-k} = conj(c_k), relative to l1_norm().
  double hermitian_defect() const;

  FourierSeries& operator+=(const FourierSeries& other);
  FourierSeries& operator-=(const FourierSeries& other);
  FourierSeries& operator*=(double s);

  friend FourierSeries operator+(FourierSeries a, const FourierSeries& b) { return a += b; }
  friend FourierSeries operator-(FourierSeries a, const FourierSeries& b) { return a -= b; }
  friend FourierSeries operator*(FourierSeries a, double s) { return a *= s; }
  friend FourierSeries operator*(double s, FourierSeries a) { return a *= s; }
  FourierSeries operator-() const { return *this * -1.0; }

 private:
  std::vector<cplx> coeffs_;
};

struct SeriesFit {
  FourierSeries series;
  /// l1 mass of the sampled spectrum beyond the retained modes.
  double tail = 0.0;
  double total = 0.0;
  double tail_ratio() const { return total > 0.0 ? tail / total : 0.0; }
};

/// Fits n_modes modes to samples on x_j = j / m. Requires m > 2 * n_modes.
SeriesFit fit_series(std::span<const double> samples, int n_modes);
SeriesFit fit_series(const std::function<double(double)>& fn, int n_modes, int grid);

/// Throws TruncationOverflow when the fit's tail ratio exceeds max_ratio.
void require_resolved(const SeriesFit& fit, double max_ratio, const char* what);

/// A function stored as constant plus zero-mean fluctuation.
struct OffsetSeries {
  double mean = 0.0;
  FourierSeries fluctuation;

  double operator()(double x) const { return mean + fluctuation.eval(x); }
  cplx eval_complex(cplx z) const { return mean + fluctuation.eval_complex(z); }
  double eval_derivative(double x) const { return fluctuation.eval_derivative(x); }
  /// Single series whose zeroth mode carries the mean.
  FourierSeries combined() const;
  static OffsetSeries split(const FourierSeries& s);
};

/// Relative coefficient level below which fitted series are treated as
/// roundoff when they are evaluated many times (cocycles, sections, orbits).
inline constexpr double kCoefficientNoiseFloor = 1e-14;

/// Fitted exponential decay |c_k| ~ C exp(-2 pi h |k|) over modes above the
/// noise floor. Returns h; infinity for (numerically) constant series.
double fit_strip_width(const FourierSeries& s, double noise_rel = 1e-13);

}  // namespace amspec
