#include "amspec/continued_fraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "amspec/error.hpp"

namespace amspec {
namespace {

using big = boost::multiprecision::cpp_dec_float_50;

bool mul_add_overflows(std::int64_t a, std::int64_t x, std::int64_t y, std::int64_t& out) {
  std::int64_t prod = 0;
  if (__builtin_mul_overflow(a, x, &prod)) return true;
  return __builtin_add_overflow(prod, y, &out);
}

// Appends convergents for partial quotient a; false on int64 overflow.
bool push_quotient(ContinuedFraction& cf, std::int64_t a) {
  const std::size_t k = cf.q.size();  // index of the new convergent
  const std::int64_t p_prev = k >= 2 ? cf.p[k - 2] : 1;
  const std::int64_t q_prev = k >= 2 ? cf.q[k - 2] : 0;
  std::int64_t p_new = 0, q_new = 0;
  if (mul_add_overflows(a, cf.p[k - 1], p_prev, p_new) || mul_add_overflows(a, cf.q[k - 1], q_prev, q_new)) {
    return false;
  }
  cf.partial_quotients.push_back(a);
  cf.p.push_back(p_new);
  cf.q.push_back(q_new);
  return true;
}

}  // namespace

Frequency Frequency::golden() {
  return {"golden", "0.61803398874989484820458683436563811772030917980576", (std::sqrt(5.0) - 1.0) / 2.0};
}

Frequency Frequency::sqrt2_minus_1() {
  return {"sqrt2m1", "0.41421356237309504880168872420969807856967187537694", std::sqrt(2.0) - 1.0};
}

Frequency Frequency::parse(const std::string& text) {
  if (text == "golden") return golden();
  if (text == "sqrt2m1") return sqrt2_minus_1();
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "unrecognized frequency '" + text + "'");
  }
  if (!(value > 0.0 && value < 1.0)) throw Error(ErrorCode::InvalidArgument, "frequency must lie in (0,1)");
  return {"", text, value};
}

ContinuedFraction continued_fraction(const Frequency& alpha, int depth) {
  if (depth < 0) throw Error(ErrorCode::InvalidArgument, "negative depth");
  ContinuedFraction cf;
  cf.p.push_back(0);
  cf.q.push_back(1);

  if (alpha.tag == "golden" || alpha.tag == "sqrt2m1") {
    const std::int64_t a = alpha.tag == "golden" ? 1 : 2;
    for (int k = 0; k < depth; ++k) {
      if (!push_quotient(cf, a)) {
        cf.precision_exhausted = true;
        break;
      }
    }
    return cf;
  }

  big x = alpha.decimal.empty() ? big(alpha.value) : big(alpha.decimal);
  const big floor_tol = big("1e-45");
  for (int k = 0; k < depth; ++k) {
    if (x <= floor_tol) {
      cf.precision_exhausted = true;
      break;
    }
    const big inv = 1 / x;
    const big a = boost::multiprecision::floor(inv);
    if (a > big(std::numeric_limits<std::int64_t>::max() / 2) ||
        !push_quotient(cf, a.convert_to<std::int64_t>())) {
      cf.precision_exhausted = true;
      break;
    }
    x = inv - a;
  }
  return cf;
}

BrjunoResult brjuno_sum(const Frequency& alpha, int depth) {
  const ContinuedFraction cf = continued_fraction(alpha, depth + 1);
  BrjunoResult out;
  out.precision_exhausted = cf.precision_exhausted;
  // q has depth()+1 entries q_0..q_depth; term k needs q_{k+1}.
  const int terms = std::min(depth, cf.depth());
  out.depth_used = terms;
  long double sum = 0.0L;
  for (int k = 0; k < terms; ++k) {
    const double term = std::log(static_cast<double>(cf.q[k + 1])) / static_cast<double>(cf.q[k]);
    sum += term;
    if (k >= terms / 2) out.beta_estimate = std::max(out.beta_estimate, term);
  }
  out.partial_sum = static_cast<double>(sum);
  return out;
}

bool is_effectively_rational(const Frequency& alpha) {
  if (alpha.has_exact_tag()) return false;
  const ContinuedFraction cf = continued_fraction(alpha, 64);
  for (std::size_t k = 0; k < cf.q.size(); ++k) {
    if (cf.q[k] > 1'000'000) break;
    const double err = std::abs(alpha.value - static_cast<double>(cf.p[k]) / static_cast<double>(cf.q[k]));
    if (err < 1e-14) return true;
  }
  return false;
}

}  // namespace amspec
