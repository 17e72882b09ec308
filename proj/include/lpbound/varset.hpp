#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace lpbound {

/// A set of query variables, stored as a bitmask over variable indices.
/// Queries are limited to 64 variables.
class VarSet {
 public:
  static constexpr int kMaxVariables = 64;

  constexpr VarSet() = default;
  constexpr explicit VarSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr VarSet singleton(int index) { return VarSet(std::uint64_t{1} << index); }
  /// {0, 1, ..., count-1}
  static constexpr VarSet first(int count) {
    return VarSet(count >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1);
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(int index) const { return (bits_ >> index) & 1U; }
  constexpr bool subset_of(VarSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr int lowest() const { return std::countr_zero(bits_); }

  constexpr VarSet operator|(VarSet o) const { return VarSet(bits_ | o.bits_); }
  constexpr VarSet operator&(VarSet o) const { return VarSet(bits_ & o.bits_); }
  constexpr VarSet operator-(VarSet o) const { return VarSet(bits_ & ~o.bits_); }
  constexpr VarSet& operator|=(VarSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  constexpr VarSet& operator&=(VarSet o) {
    bits_ &= o.bits_;
    return *this;
  }

  constexpr auto operator<=>(const VarSet&) const = default;

  std::vector<int> indices() const {
    std::vector<int> out;
    for (auto b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

 private:
  std::uint64_t bits_ = 0;
};

/// Calls `fn(sub)` for every subset of `set`, including the empty set and `set` itself.
template <typename Fn>
void for_each_subset(VarSet set, Fn&& fn) {
  const auto full = set.bits();
  auto sub = full;
  while (true) {
    fn(VarSet(sub));
    if (sub == 0) break;
    sub = (sub - 1) & full;
  }
}

}  // namespace lpbound
