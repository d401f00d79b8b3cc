#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mothergraph/perm.hpp"

namespace mg {

inline constexpr int kMaxTrigger = 15;

// Element of Sym(m) wr Sym(m-1): the automorphisms of the first two tree
// levels that fix the letter 0 and its children. `pi` permutes the nonzero
// letter (stored as a permutation of {0..m-1} fixing 0); `taus[a]` permutes
// the letter following an input letter a, indexed by a before `pi` is applied.
// taus[0] is unused and kept as the identity.
struct WreathElem {
  Perm pi;
  std::array<Perm, kMaxAlphabet> taus{};

  static WreathElem identity(int m);
  // Enumerates all (m-1)! (m!)^(m-1) elements in a fixed order.
  static std::vector<WreathElem> all(int m);

  int alphabet() const noexcept { return pi.size(); }
  bool is_identity() const noexcept;
  WreathElem operator*(const WreathElem& then) const;
  WreathElem inverse() const;
  std::size_t hash() const noexcept;

  friend bool operator==(const WreathElem&, const WreathElem&) = default;
};

// A generator of the mother group in lambda normal form: either a root
// permutation, or lambda_{w,sigma} which looks for the nonzero trigger word w
// among the first |w| nonzero letters and then applies the wreath element to
// the next nonzero letter and the letter after it.
class Generator {
 public:
  enum class Kind : std::uint8_t { RootPerm, Lambda };

  static Generator root_perm(const Perm& sigma);
  // `trigger` is in reading order (first letter read first).
  static Generator lambda(std::span<const Digit> trigger, const WreathElem& elem);

  Kind kind() const noexcept { return kind_; }
  bool is_root_perm() const noexcept { return kind_ == Kind::RootPerm; }
  bool is_lambda() const noexcept { return kind_ == Kind::Lambda; }
  int alphabet() const noexcept { return perm_.size(); }
  // -1 for root permutations, |trigger| otherwise.
  int degree() const noexcept {
    return kind_ == Kind::RootPerm ? -1 : static_cast<int>(trigger_len_);
  }

  const Perm& perm() const noexcept { return perm_; }  // RootPerm only
  const WreathElem& elem() const noexcept { return elem_; }  // Lambda only
  std::span<const Digit> trigger() const noexcept {
    return {trigger_.data(), trigger_len_};
  }

  // True when the generator acts trivially on the whole tree.
  bool is_trivial() const noexcept;
  Generator inverse() const;

  // Permutation applied to the first letter.
  Perm top() const;
  // First-level section at input letter x; nullopt stands for the identity.
  std::optional<Generator> section_at(Digit x) const;

  // Whether g and h can be fused into a single generator (same subgroup
  // L^w, or both root permutations).
  bool same_factor(const Generator& other) const noexcept;
  Generator fused_with(const Generator& then) const;

  std::size_t hash() const noexcept;
  friend bool operator==(const Generator&, const Generator&) = default;

 private:
  Kind kind_ = Kind::RootPerm;
  std::uint8_t trigger_len_ = 0;
  std::array<Digit, kMaxTrigger> trigger_{};
  Perm perm_;
  WreathElem elem_;
};

// Finite word over {0..m-1}. digits()[0] is the first letter read by the
// automaton (position 1); it is displayed rightmost, so the integer encoding
// sum digit_i * m^(i-1) prints as an ordinary base-m numeral.
class LetterWord {
 public:
  LetterWord() = default;
  LetterWord(int m, std::vector<Digit> digits);

  static LetterWord zeros(int m, int n);
  static LetterWord from_value(std::uint64_t value, int n, int m);
  static LetterWord from_display(std::string_view text, int m);

  int alphabet() const noexcept { return m_; }
  int length() const noexcept { return static_cast<int>(digits_.size()); }
  std::span<const Digit> digits() const noexcept { return digits_; }
  std::span<Digit> digits() noexcept { return digits_; }
  // 1-based position as in the text: position 1 is read first.
  Digit at(int position) const { return digits_.at(position - 1); }

  std::uint64_t value() const noexcept;
  std::string display() const;

  friend bool operator==(const LetterWord&, const LetterWord&) = default;

 private:
  int m_ = 2;
  std::vector<Digit> digits_;
};

// Group element as a product of generators, acting left to right
// (v.(g h) = (v.g).h). The empty word is the identity.
class GroupWord {
 public:
  explicit GroupWord(int m = 2) : m_(m) {}
  GroupWord(int m, std::vector<Generator> letters);
  static GroupWord of(const Generator& g) { return GroupWord(g.alphabet(), {g}); }

  int alphabet() const noexcept { return m_; }
  bool empty() const noexcept { return letters_.empty(); }
  std::size_t size() const noexcept { return letters_.size(); }
  const std::vector<Generator>& letters() const noexcept { return letters_; }
  const Generator& operator[](std::size_t i) const { return letters_[i]; }

  void push_back(const Generator& g);
  // Appends g, fusing it into the last letter when they share a factor.
  void push_reduced(const Generator& g);
  GroupWord inverse() const;
  GroupWord operator*(const GroupWord& rhs) const;

  // Canonical form: drops trivial letters and fuses adjacent letters of the
  // same level factor. Exact as a group element.
  GroupWord reduced() const;
  bool only_lambdas() const noexcept;
  int max_degree() const noexcept;  // -2 for the empty word

  std::size_t hash() const noexcept;
  friend bool operator==(const GroupWord&, const GroupWord&) = default;

 private:
  int m_;
  std::vector<Generator> letters_;
};

struct GeneratorHash {
  std::size_t operator()(const Generator& g) const noexcept { return g.hash(); }
};
struct GroupWordHash {
  std::size_t operator()(const GroupWord& w) const noexcept { return w.hash(); }
};

}  // namespace mg
