#include "amspec/fourier_series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/FFT>

#include "amspec/error.hpp"

namespace amspec {

FourierSeries::FourierSeries(int n_modes) {
  if (n_modes < 0) throw Error(ErrorCode::InvalidArgument, "negative mode count");
  coeffs_.assign(2 * static_cast<std::size_t>(n_modes) + 1, cplx{0.0, 0.0});
}

FourierSeries::FourierSeries(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "coefficient array must have odd length 2N+1");
  }
}

FourierSeries FourierSeries::constant(double value, int n_modes) {
  FourierSeries s(n_modes);
  s.coeffs_[n_modes] = value;
  return s;
}

FourierSeries FourierSeries::harmonic(int k, double cos_amp, double sin_amp, int n_modes) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "harmonic index must be >= 0");
  FourierSeries s(std::max(n_modes, k));
  if (k == 0) {
    s.set_coeff(0, cos_amp);
  } else {
    // a cos + b sin = Re[(a - i b) e^{2 pi i k x}]
    s.set_coeff(k, cplx{cos_amp / 2.0, -sin_amp / 2.0});
  }
  return s;
}

cplx FourierSeries::coeff(int k) const {
  const int n = n_modes();
  if (k < -n || k > n) return {0.0, 0.0};
  return coeffs_[static_cast<std::size_t>(k + n)];
}

void FourierSeries::set_coeff(int k, cplx value) {
  const int n = n_modes();
  if (std::abs(k) > n) throw Error(ErrorCode::TruncationOverflow, "mode index exceeds capacity");
  if (k == 0) {
    coeffs_[n] = cplx{value.real(), 0.0};
    return;
  }
  coeffs_[static_cast<std::size_t>(n + k)] = value;
  coeffs_[static_cast<std::size_t>(n - k)] = std::conj(value);
}

double FourierSeries::eval(double x) const {
  const int n = n_modes();
  const cplx z = std::polar(1.0, kTwoPi * x);
  cplx zk{1.0, 0.0};
  double acc = 0.0;
  for (int k = 1; k <= n; ++k) {
    zk *= z;
    acc += (coeffs_[n + k] * zk).real();
  }
  return coeffs_[n].real() + 2.0 * acc;
}

double FourierSeries::eval_derivative(double x) const {
  const int n = n_modes();
  const cplx z = std::polar(1.0, kTwoPi * x);
  cplx zk{1.0, 0.0};
  double acc = 0.0;
  for (int k = 1; k <= n; ++k) {
    zk *= z;
    acc += (cplx{0.0, kTwoPi * k} * coeffs_[n + k] * zk).real();
  }
  return 2.0 * acc;
}

cplx FourierSeries::eval_complex(cplx z) const {
  const int n = n_modes();
  const cplx w = std::exp(cplx{0.0, kTwoPi} * z);
  const cplx winv = 1.0 / w;
  cplx acc = coeffs_[n];
  cplx wp{1.0, 0.0};
  cplx wm{1.0, 0.0};
  for (int k = 1; k <= n; ++k) {
    wp *= w;
    wm *= winv;
    acc += coeffs_[n + k] * wp + coeffs_[n - k] * wm;
  }
  return acc;
}

std::vector<double> FourierSeries::sample(int m) const {
  if (m <= 0) throw Error(ErrorCode::InvalidArgument, "sample grid must be positive");
  const int n = n_modes();
  std::vector<double> out(static_cast<std::size_t>(m));
  if (m <= 2 * n) {
    for (int j = 0; j < m; ++j) out[j] = eval(static_cast<double>(j) / m);
    return out;
  }
  std::vector<cplx> spectrum(static_cast<std::size_t>(m), cplx{0.0, 0.0});
  for (int k = -n; k <= n; ++k) spectrum[static_cast<std::size_t>((k + m) % m)] = coeff(k);
  std::vector<cplx> values;
  Eigen::FFT<double> fft;
  fft.inv(values, spectrum);
  for (int j = 0; j < m; ++j) out[j] = values[j].real() * m;
  return out;
}

FourierSeries FourierSeries::derivative() const {
  FourierSeries d(n_modes());
  for (int k = 1; k <= n_modes(); ++k) d.set_coeff(k, cplx{0.0, kTwoPi * k} * coeff(k));
  return d;
}

FourierSeries FourierSeries::antiderivative() const {
  FourierSeries a(n_modes());
  for (int k = 1; k <= n_modes(); ++k) a.set_coeff(k, coeff(k) / cplx{0.0, kTwoPi * k});
  return a;
}

FourierSeries FourierSeries::zero_mean() const {
  FourierSeries z = *this;
  z.coeffs_[n_modes()] = 0.0;
  return z;
}

FourierSeries FourierSeries::shifted(double s) const {
  FourierSeries out(n_modes());
  out.coeffs_[n_modes()] = coeffs_[n_modes()];
  for (int k = 1; k <= n_modes(); ++k) out.set_coeff(k, coeff(k) * std::polar(1.0, kTwoPi * k * s));
  return out;
}

FourierSeries FourierSeries::resized(int n) const {
  FourierSeries out(n);
  const int m = std::min(n, n_modes());
  for (int k = -m; k <= m; ++k) out.coeffs_[static_cast<std::size_t>(k + n)] = coeff(k);
  return out;
}

FourierSeries FourierSeries::trimmed(double rel_tol) const {
  const double cutoff = rel_tol * l1_norm();
  int keep = n_modes();
  while (keep > 0 && std::abs(coeff(keep)) <= cutoff) --keep;
  return resized(keep);
}

double FourierSeries::l1_norm() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::abs(c);
  return s;
}

double FourierSeries::sup_norm(int grid) const {
  double s = 0.0;
  for (double v : sample(grid)) s = std::max(s, std::abs(v));
  return s;
}

double FourierSeries::hermitian_defect() const {
  const double scale = std::max(l1_norm(), std::numeric_limits<double>::min());
  double worst = std::abs(coeff(0).imag());
  for (int k = 1; k <= n_modes(); ++k) worst = std::max(worst, std::abs(coeff(-k) - std::conj(coeff(k))));
  return worst / scale;
}

FourierSeries& FourierSeries::operator+=(const FourierSeries& other) {
  if (other.n_modes() > n_modes()) *this = resized(other.n_modes());
  const int n = n_modes();
  for (int k = -other.n_modes(); k <= other.n_modes(); ++k) coeffs_[k + n] += other.coeff(k);
  return *this;
}

FourierSeries& FourierSeries::operator-=(const FourierSeries& other) {
  if (other.n_modes() > n_modes()) *this = resized(other.n_modes());
  const int n = n_modes();
  for (int k = -other.n_modes(); k <= other.n_modes(); ++k) coeffs_[k + n] -= other.coeff(k);
  return *this;
}

FourierSeries& FourierSeries::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SeriesFit fit_series(std::span<const double> samples, int n_modes) {
  const int m = static_cast<int>(samples.size());
  if (n_modes < 0 || m <= 2 * n_modes) {
    throw Error(ErrorCode::TruncationOverflow,
                "grid of " + std::to_string(m) + " points cannot resolve " + std::to_string(n_modes) + " modes");
  }
  std::vector<cplx> in(samples.begin(), samples.end());
  std::vector<cplx> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, in);

  SeriesFit fit{FourierSeries(n_modes), 0.0, 0.0};
  fit.series.set_coeff(0, spectrum[0] / static_cast<double>(m));
  for (int k = 1; k <= n_modes; ++k) {
    // Average the two halves so the result is exactly Hermitian.
    const cplx ck = 0.5 * (spectrum[k] + std::conj(spectrum[m - k])) / static_cast<double>(m);
    fit.series.set_coeff(k, ck);
  }
  for (int j = 0; j < m; ++j) {
    const double mag = std::abs(spectrum[j]) / m;
    fit.total += mag;
    const int k = j <= m / 2 ? j : m - j;
    if (k > n_modes) fit.tail += mag;
  }
  return fit;
}

SeriesFit fit_series(const std::function<double(double)>& fn, int n_modes, int grid) {
  std::vector<double> samples(static_cast<std::size_t>(grid));
  for (int j = 0; j < grid; ++j) samples[j] = fn(static_cast<double>(j) / grid);
  return fit_series(samples, n_modes);
}

void require_resolved(const SeriesFit& fit, double max_ratio, const char* what) {
  if (fit.tail_ratio() > max_ratio) {
    throw Error(ErrorCode::TruncationOverflow,
                std::string(what) + ": Fourier tail ratio " + std::to_string(fit.tail_ratio()) + " exceeds " +
                    std::to_string(max_ratio));
  }
}

FourierSeries OffsetSeries::combined() const {
  FourierSeries s = fluctuation;
  s.set_coeff(0, mean);
  return s;
}

OffsetSeries OffsetSeries::split(const FourierSeries& s) { return {s.mean(), s.zero_mean()}; }

double fit_strip_width(const FourierSeries& s, double noise_rel) {
  const double floor = noise_rel * std::max(s.l1_norm(), std::numeric_limits<double>::min());
  double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
  int count = 0;
  for (int k = 1; k <= s.n_modes(); ++k) {
    const double mag = std::abs(s.coeff(k));
    if (mag <= floor) continue;
    const double y = std::log(mag);
    sk += k;
    sy += y;
    skk += static_cast<double>(k) * k;
    sky += k * y;
    ++count;
  }
  if (count < 2) return std::numeric_limits<double>::infinity();
  const double slope = (count * sky - sk * sy) / (count * skk - sk * sk);
  if (slope >= 0.0) return 0.0;
  return -slope / kTwoPi;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonInvertible: return "NonInvertible";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TruncationOverflow: return "TruncationOverflow";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::SaddlePoint: return "SaddlePoint";
    case ErrorCode::InvarianceCertificationFailed: return "InvarianceCertificationFailed";
    case ErrorCode::ConsistencyFailure: return "ConsistencyFailure";
    case ErrorCode::StripTooWide: return "StripTooWide";
    case ErrorCode::WindingNonzero: return "WindingNonzero";
    case ErrorCode::SingularConjugator: return "SingularConjugator";
    case ErrorCode::SmallDivisorBreakdown: return "SmallDivisorBreakdown";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::PositiveNu0: return "PositiveNu0";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace amspec
