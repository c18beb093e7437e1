#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace amspec {

/// Rotation frequency in (0,1): a decimal string (kept at full precision for
/// continued-fraction work) plus an optional exact tag.
///
/// Tags: "golden" = (sqrt 5 - 1)/2 with a_k = 1, "sqrt2m1" = sqrt 2 - 1 with a_k = 2.
struct Frequency {
  std::string tag;      ///< empty when untagged
  std::string decimal;  ///< decimal representation, at least double precision
  double value = 0.0;

  static Frequency golden();
  static Frequency sqrt2_minus_1();
  /// Accepts a tag name or a decimal in (0,1). Throws InvalidArgument.
  static Frequency parse(const std::string& text);

  bool has_exact_tag() const { return !tag.empty(); }
};

struct ContinuedFraction {
  std::vector<std::int64_t> partial_quotients;  ///< a_1, a_2, ... (a_0 = 0 implied)
  std::vector<std::int64_t> p;                  ///< p_0 = 0, p_1, ...
  std::vector<std::int64_t> q;                  ///< q_0 = 1, q_1 = a_1, ...
  /// Set when the expansion stopped before the requested depth because the
  /// working precision ran out, the expansion terminated, or q overflowed.
  bool precision_exhausted = false;

  int depth() const { return static_cast<int>(partial_quotients.size()); }
};

/// Expansion alpha = [0; a_1, a_2, ...] to depth at most `depth`.
ContinuedFraction continued_fraction(const Frequency& alpha, int depth);

struct BrjunoResult {
  double partial_sum = 0.0;    ///< sum_{k < K} log(q_{k+1}) / q_k
  double beta_estimate = 0.0;  ///< max of log(q_{k+1}) / q_k over k in [K/2, K)
  int depth_used = 0;
  bool precision_exhausted = false;
};

BrjunoResult brjuno_sum(const Frequency& alpha, int depth);

/// True when alpha is within 1e-14 of p/q for some q <= 10^6.
bool is_effectively_rational(const Frequency& alpha);

}  // namespace amspec
