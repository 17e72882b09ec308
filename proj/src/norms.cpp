#include "lpbound/norms.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace lpbound {

std::string PNorm::to_string() const {
  if (is_infinite()) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p_);
  return buf;
}

std::optional<PNorm> PNorm::parse(std::string_view text) {
  if (text == "inf" || text == "Inf" || text == "INF") return infinity();
  double p = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), p);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(p >= 1.0) || !std::isfinite(p))
    return std::nullopt;
  return PNorm(p);
}

std::vector<PNorm> default_p_set() {
  std::vector<PNorm> ps;
  for (int p = 1; p <= 10; ++p) ps.emplace_back(p);
  ps.push_back(PNorm::infinity());
  return ps;
}

DegreeSequence DegreeSequence::prefix(int exponent) const {
  DegreeSequence out = *this;
  const std::size_t keep = std::size_t{1} << exponent;
  if (out.degrees.size() > keep) out.degrees.resize(keep);
  return out;
}

double lp_norm(const DegreeSequence& d, PNorm p) {
  if (d.degrees.empty()) return 0.0;
  // Degrees are sorted descending, so the first entry is the maximum.
  const double top = static_cast<double>(d.degrees.front());
  if (p.is_infinite()) return top;
  if (p.value() == 1.0) {
    std::uint64_t sum = 0;
    for (auto x : d.degrees) sum += x;
    return static_cast<double>(sum);
  }
  double acc = 0.0;
  for (auto x : d.degrees) acc += std::pow(static_cast<double>(x) / top, p.value());
  return top * std::pow(acc, 1.0 / p.value());
}

NormSet NormSet::zero(const std::vector<PNorm>& ps) {
  NormSet out;
  for (auto p : ps) out.values[p] = 0.0;
  return out;
}

NormSet NormSet::of(const DegreeSequence& d, const std::vector<PNorm>& ps) {
  NormSet out;
  for (auto p : ps) out.values[p] = lp_norm(d, p);
  out.ell0 = static_cast<double>(d.length());
  return out;
}

bool NormSet::is_zero() const {
  if (ell0 == 0.0) return true;
  return std::any_of(values.begin(), values.end(), [](const auto& kv) { return kv.second == 0.0; });
}

std::optional<double> NormSet::at(PNorm p) const {
  auto it = values.find(p);
  if (it == values.end()) return std::nullopt;
  return it->second;
}

bool NormSet::is_monotone(double rel_tol) const {
  if (!(ell0 >= 0.0) || !std::isfinite(ell0)) return false;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& [p, v] : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) return false;
    if (v > prev * (1.0 + rel_tol)) return false;
    prev = v;
  }
  return true;
}

bool dominated_by(const NormSet& a, const NormSet& b, double rel_tol) {
  for (const auto& [p, v] : a.values) {
    auto w = b.at(p);
    if (!w) continue;
    if (v > *w + rel_tol * std::max(1.0, *w)) return false;
  }
  return a.ell0 <= b.ell0 + rel_tol * std::max(1.0, b.ell0);
}

}  // namespace lpbound
