#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mg {

inline constexpr int kMaxAlphabet = 8;

using Digit = std::uint8_t;

// Permutation of the alphabet {0, ..., m-1}. Composition follows the right
// action convention used throughout: (p * q)(x) = q(p(x)), i.e. p acts first.
class Perm {
 public:
  Perm() = default;

  static Perm identity(int m);
  // Throws InvalidArgument unless `images` is a bijection of {0..m-1}.
  static Perm from_images(std::span<const int> images);
  static Perm transposition(int m, int a, int b);
  static Perm cycle(int m);  // x -> x+1 mod m

  // All m! permutations, lexicographic by image table.
  static std::vector<Perm> all(int m);
  static std::vector<Perm> all_fixing_zero(int m);

  int size() const noexcept { return size_; }
  Digit operator()(Digit x) const noexcept { return images_[x]; }
  Digit operator[](int x) const noexcept { return images_[x]; }

  Perm operator*(const Perm& then) const;
  Perm inverse() const;
  bool is_identity() const noexcept;
  bool fixes(Digit x) const noexcept { return images_[x] == x; }

  std::size_t hash() const noexcept;

  friend bool operator==(const Perm&, const Perm&) = default;
  friend auto operator<=>(const Perm&, const Perm&) = default;

 private:
  std::uint8_t size_ = 0;
  std::array<Digit, kMaxAlphabet> images_{};
};

}  // namespace mg
