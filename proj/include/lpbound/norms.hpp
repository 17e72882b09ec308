#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lpbound {

/// The exponent p of an lp-norm. Infinity is a reserved token ordered after every finite p.
class PNorm {
 public:
  constexpr PNorm() = default;
  constexpr explicit PNorm(double p) : p_(p) {}
  static constexpr PNorm infinity() { return PNorm(std::numeric_limits<double>::infinity()); }

  constexpr double value() const { return p_; }
  constexpr bool is_infinite() const { return p_ == std::numeric_limits<double>::infinity(); }
  /// 1/p, with 1/inf = 0.
  constexpr double inverse() const { return is_infinite() ? 0.0 : 1.0 / p_; }

  constexpr auto operator<=>(const PNorm&) const = default;

  std::string to_string() const;
  /// Accepts a positive decimal or "inf".
  static std::optional<PNorm> parse(std::string_view text);

 private:
  double p_ = 1.0;
};

/// The default norm set {1, ..., 10, inf}.
std::vector<PNorm> default_p_set();

/// Frequencies of distinct values, sorted non-increasing.
struct DegreeSequence {
  std::vector<std::uint64_t> degrees;
  std::optional<std::string> u_column;
  std::vector<std::string> v_columns;

  std::size_t length() const { return degrees.size(); }
  bool empty() const { return degrees.empty(); }
  /// The sequence of the 2^exponent largest degrees.
  DegreeSequence prefix(int exponent) const;
};

/// (sum d_i^p)^(1/p); max for p = inf; 0 for the empty sequence.
double lp_norm(const DegreeSequence& d, PNorm p);

/// Norm values of one degree sequence for every configured p, plus its length.
struct NormSet {
  std::map<PNorm, double> values;
  double ell0 = 0.0;

  /// The set of an empty sequence over the given p values.
  static NormSet zero(const std::vector<PNorm>& ps);
  static NormSet of(const DegreeSequence& d, const std::vector<PNorm>& ps);

  bool is_zero() const;
  std::optional<double> at(PNorm p) const;
  /// True when values never increase with p and all entries are finite and non-negative.
  bool is_monotone(double rel_tol = 1e-12) const;
  bool operator==(const NormSet&) const = default;
};

/// Pointwise comparison `a <= b` on their shared p values, with a relative tolerance.
bool dominated_by(const NormSet& a, const NormSet& b, double rel_tol = 1e-12);

}  // namespace lpbound
