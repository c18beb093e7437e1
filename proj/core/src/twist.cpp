#include "amspec/twist.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include "amspec/error.hpp"

namespace amspec {

CylinderState twist_step(const FourierSeries& f, CylinderState s) {
  const double kick = f.eval(s.x);
  const double r = s.r + kick;
  return {s.x + r, r};
}

CylinderState twist_step_inverse(const FourierSeries& f, CylinderState s) {
  const double x = s.x - s.r;
  return {x, s.r - f.eval(x)};
}

std::vector<CylinderState> orbit(const FourierSeries& f, CylinderState s, long n) {
  if (std::abs(f.mean()) > 1e-10) {
    std::clog << "amspec: warning: twist force has nonzero mean " << f.mean() << "\n";
  }
  const long steps = std::labs(n);
  std::vector<CylinderState> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(s);
  for (long k = 0; k < steps; ++k) {
    s = n >= 0 ? twist_step(f, s) : twist_step_inverse(f, s);
    if (!(std::abs(s.r) <= kDiffusionGuard)) {
      throw Error(ErrorCode::Overflow, "momentum left the diffusion guard after " + std::to_string(k + 1) + " steps");
    }
    out.push_back(s);
  }
  return out;
}

GeneratingFunction::GeneratingFunction(const FourierSeries& f, double a)
    : f_(f), F_(f.antiderivative()), a_(a) {}

double GeneratingFunction::operator()(double x0, double x1) const {
  const double d = x1 - x0 - a_;
  return 0.5 * d * d + F_.eval(x0);
}

double segment_action(const GeneratingFunction& h, const Configuration& c) {
  long double sum = 0.0L;
  for (std::size_t n = 0; n + 1 < c.points.size(); ++n) sum += h(c.points[n], c.points[n + 1]);
  return static_cast<double>(sum);
}

double segment_action(const FourierSeries& f, double a, const Configuration& c) {
  return segment_action(GeneratingFunction(f, a), c);
}

double action_difference(const GeneratingFunction& h, const Configuration& base, const Configuration& perturbed,
                         std::size_t lo, std::size_t hi) {
  if (base.size() != perturbed.size() || hi >= base.size() || lo > hi) {
    throw Error(ErrorCode::InvalidArgument, "action_difference: incompatible window");
  }
  // Terms h(x_n, x_{n+1}) with n in [lo-1, hi] touch the window.
  const std::size_t first = lo == 0 ? 0 : lo - 1;
  const std::size_t last = std::min(hi, base.size() - 2);
  long double diff = 0.0L;
  for (std::size_t n = first; n <= last; ++n) {
    diff += h(perturbed.points[n], perturbed.points[n + 1]) - h(base.points[n], base.points[n + 1]);
  }
  return static_cast<double>(diff);
}

std::vector<double> euler_lagrange_residual(const FourierSeries& f, const Configuration& c) {
  if (c.size() < 3) throw Error(ErrorCode::InvalidArgument, "residual needs at least three points");
  std::vector<double> res(c.size() - 2);
  for (std::size_t n = 1; n + 1 < c.size(); ++n) {
    const auto& x = c.points;
    res[n - 1] = (x[n + 1] - x[n]) - (x[n] - x[n - 1]) - f.eval(x[n]);
  }
  return res;
}

Configuration configuration_from_orbit(std::span<const CylinderState> states) {
  Configuration c;
  c.points.reserve(states.size());
  for (const auto& s : states) c.points.push_back(s.x);
  return c;
}

}  // namespace amspec
