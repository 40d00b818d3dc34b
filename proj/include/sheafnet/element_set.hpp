#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace sheafnet {

/// Subset of a universe of at most 64 indexed elements, stored as a bit mask.
class ElementSet {
 public:
  static constexpr std::size_t kCapacity = 64;

  constexpr ElementSet() = default;
  constexpr explicit ElementSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr ElementSet singleton(std::size_t i) { return ElementSet(std::uint64_t{1} << i); }
  static constexpr ElementSet full(std::size_t n) {
    return ElementSet(n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool contains(std::size_t i) const { return (bits_ >> i) & 1U; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool subset_of(ElementSet other) const { return (bits_ & ~other.bits_) == 0; }

  constexpr ElementSet& insert(std::size_t i) {
    bits_ |= std::uint64_t{1} << i;
    return *this;
  }
  constexpr ElementSet& erase(std::size_t i) {
    bits_ &= ~(std::uint64_t{1} << i);
    return *this;
  }

  friend constexpr ElementSet operator&(ElementSet a, ElementSet b) { return ElementSet(a.bits_ & b.bits_); }
  friend constexpr ElementSet operator|(ElementSet a, ElementSet b) { return ElementSet(a.bits_ | b.bits_); }
  /// Set difference.
  friend constexpr ElementSet operator-(ElementSet a, ElementSet b) { return ElementSet(a.bits_ & ~b.bits_); }
  friend constexpr bool operator==(ElementSet a, ElementSet b) = default;
  friend constexpr auto operator<=>(ElementSet a, ElementSet b) = default;

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
    return out;
  }

 private:
  std::uint64_t bits_ = 0;
};

}  // namespace sheafnet
