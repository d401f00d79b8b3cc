#include "mothergraph/generator.hpp"

#include <algorithm>
#include <string>

#include "mothergraph/errors.hpp"

namespace mg {

namespace {

inline std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

// ---------------------------------------------------------------------------
// WreathElem

WreathElem WreathElem::identity(int m) {
  WreathElem e;
  e.pi = Perm::identity(m);
  for (int a = 0; a < m; ++a) e.taus[a] = Perm::identity(m);
  return e;
}

std::vector<WreathElem> WreathElem::all(int m) {
  const std::vector<Perm> pis = Perm::all_fixing_zero(m);
  const std::vector<Perm> perms = Perm::all(m);
  std::vector<WreathElem> out;
  // Odometer over the (m-1)-tuple of tau choices.
  std::vector<std::size_t> idx(static_cast<std::size_t>(m - 1), 0);
  for (const Perm& pi : pis) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      WreathElem e = identity(m);
      e.pi = pi;
      for (int a = 1; a < m; ++a) e.taus[a] = perms[idx[a - 1]];
      out.push_back(e);
      std::size_t pos = 0;
      while (pos < idx.size() && ++idx[pos] == perms.size()) idx[pos++] = 0;
      if (pos == idx.size()) break;
    }
  }
  return out;
}

bool WreathElem::is_identity() const noexcept {
  if (!pi.is_identity()) return false;
  for (int a = 1; a < alphabet(); ++a) {
    if (!taus[a].is_identity()) return false;
  }
  return true;
}

WreathElem WreathElem::operator*(const WreathElem& then) const {
  WreathElem e = identity(alphabet());
  e.pi = pi * then.pi;
  for (int a = 1; a < alphabet(); ++a) e.taus[a] = taus[a] * then.taus[pi(a)];
  return e;
}

WreathElem WreathElem::inverse() const {
  WreathElem e = identity(alphabet());
  e.pi = pi.inverse();
  for (int a = 1; a < alphabet(); ++a) e.taus[a] = taus[e.pi(a)].inverse();
  return e;
}

std::size_t WreathElem::hash() const noexcept {
  std::size_t h = pi.hash();
  for (int a = 1; a < alphabet(); ++a) h = mix(h, taus[a].hash());
  return h;
}

// ---------------------------------------------------------------------------
// Generator

Generator Generator::root_perm(const Perm& sigma) {
  Generator g;
  g.kind_ = Kind::RootPerm;
  g.perm_ = sigma;
  return g;
}

Generator Generator::lambda(std::span<const Digit> trigger, const WreathElem& elem) {
  const int m = elem.alphabet();
  if (trigger.size() > static_cast<std::size_t>(kMaxTrigger)) {
    throw InvalidArgument("trigger longer than " + std::to_string(kMaxTrigger));
  }
  if (!elem.pi.fixes(0)) throw InvalidArgument("wreath element must fix 0");
  Generator g;
  g.kind_ = Kind::Lambda;
  g.perm_ = Perm::identity(m);
  g.elem_ = elem;
  g.trigger_len_ = static_cast<std::uint8_t>(trigger.size());
  for (std::size_t i = 0; i < trigger.size(); ++i) {
    if (trigger[i] == 0 || trigger[i] >= m) {
      throw InvalidArgument("trigger letters must lie in 1..m-1");
    }
    g.trigger_[i] = trigger[i];
  }
  return g;
}

bool Generator::is_trivial() const noexcept {
  return kind_ == Kind::RootPerm ? perm_.is_identity() : elem_.is_identity();
}

Generator Generator::inverse() const {
  if (kind_ == Kind::RootPerm) return root_perm(perm_.inverse());
  return lambda(trigger(), elem_.inverse());
}

Perm Generator::top() const {
  if (kind_ == Kind::RootPerm) return perm_;
  if (trigger_len_ == 0) return elem_.pi;
  return Perm::identity(alphabet());
}

std::optional<Generator> Generator::section_at(Digit x) const {
  if (kind_ == Kind::RootPerm) return std::nullopt;
  if (x == 0) return *this;
  if (trigger_len_ == 0) {
    const Perm& tau = elem_.taus[x];
    if (tau.is_identity()) return std::nullopt;
    return root_perm(tau);
  }
  if (trigger_[0] != x) return std::nullopt;
  return lambda(trigger().subspan(1), elem_);
}

bool Generator::same_factor(const Generator& other) const noexcept {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::RootPerm) return true;
  return trigger_len_ == other.trigger_len_ &&
         std::equal(trigger_.begin(), trigger_.begin() + trigger_len_,
                    other.trigger_.begin());
}

Generator Generator::fused_with(const Generator& then) const {
  if (kind_ == Kind::RootPerm) return root_perm(perm_ * then.perm_);
  return lambda(trigger(), elem_ * then.elem_);
}

std::size_t Generator::hash() const noexcept {
  std::size_t h = static_cast<std::size_t>(kind_) + 1;
  if (kind_ == Kind::RootPerm) return mix(h, perm_.hash());
  for (int i = 0; i < trigger_len_; ++i) h = mix(h, trigger_[i]);
  return mix(mix(h, trigger_len_), elem_.hash());
}

// ---------------------------------------------------------------------------
// LetterWord

LetterWord::LetterWord(int m, std::vector<Digit> digits) : m_(m), digits_(std::move(digits)) {
  if (m < 2 || m > kMaxAlphabet) throw InvalidArgument("alphabet size outside 2..8");
  for (Digit x : digits_) {
    if (x >= m) throw InvalidArgument("digit outside alphabet");
  }
}

LetterWord LetterWord::zeros(int m, int n) {
  return LetterWord(m, std::vector<Digit>(static_cast<std::size_t>(n), 0));
}

LetterWord LetterWord::from_value(std::uint64_t value, int n, int m) {
  std::vector<Digit> digits(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    digits[i] = static_cast<Digit>(value % static_cast<std::uint64_t>(m));
    value /= static_cast<std::uint64_t>(m);
  }
  if (value != 0) throw InvalidArgument("value does not fit in n digits");
  return LetterWord(m, std::move(digits));
}

LetterWord LetterWord::from_display(std::string_view text, int m) {
  std::vector<Digit> digits(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[text.size() - 1 - i];
    if (c < '0' || c > '9' || c - '0' >= m) {
      throw ParseError("invalid digit '" + std::string(1, c) + "'", text.size() - 1 - i);
    }
    digits[i] = static_cast<Digit>(c - '0');
  }
  return LetterWord(m, std::move(digits));
}

std::uint64_t LetterWord::value() const noexcept {
  std::uint64_t v = 0;
  for (auto it = digits_.rbegin(); it != digits_.rend(); ++it) {
    v = v * static_cast<std::uint64_t>(m_) + *it;
  }
  return v;
}

std::string LetterWord::display() const {
  std::string s;
  s.reserve(digits_.size());
  for (auto it = digits_.rbegin(); it != digits_.rend(); ++it) {
    s.push_back(static_cast<char>('0' + *it));
  }
  return s;
}

// ---------------------------------------------------------------------------
// GroupWord

GroupWord::GroupWord(int m, std::vector<Generator> letters) : m_(m), letters_(std::move(letters)) {
  for (const Generator& g : letters_) {
    if (g.alphabet() != m_) throw InvalidArgument("generator alphabet mismatch");
  }
}

void GroupWord::push_back(const Generator& g) {
  if (g.alphabet() != m_) throw InvalidArgument("generator alphabet mismatch");
  letters_.push_back(g);
}

void GroupWord::push_reduced(const Generator& g) {
  if (g.alphabet() != m_) throw InvalidArgument("generator alphabet mismatch");
  if (g.is_trivial()) return;
  if (!letters_.empty() && letters_.back().same_factor(g)) {
    const Generator fused = letters_.back().fused_with(g);
    letters_.pop_back();
    if (!fused.is_trivial()) letters_.push_back(fused);
    return;
  }
  letters_.push_back(g);
}

GroupWord GroupWord::inverse() const {
  GroupWord w(m_);
  w.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) {
    w.letters_.push_back(it->inverse());
  }
  return w;
}

GroupWord GroupWord::operator*(const GroupWord& rhs) const {
  if (rhs.m_ != m_) throw InvalidArgument("group word alphabet mismatch");
  GroupWord w = *this;
  w.letters_.insert(w.letters_.end(), rhs.letters_.begin(), rhs.letters_.end());
  return w;
}

GroupWord GroupWord::reduced() const {
  GroupWord w(m_);
  auto& out = w.letters_;
  out.reserve(letters_.size());
  for (const Generator& g : letters_) {
    if (g.is_trivial()) continue;
    if (!out.empty() && out.back().same_factor(g)) {
      Generator fused = out.back().fused_with(g);
      out.pop_back();
      if (!fused.is_trivial()) out.push_back(fused);
      continue;
    }
    out.push_back(g);
  }
  return w;
}

bool GroupWord::only_lambdas() const noexcept {
  return std::all_of(letters_.begin(), letters_.end(),
                     [](const Generator& g) { return g.is_lambda(); });
}

int GroupWord::max_degree() const noexcept {
  int d = -2;
  for (const Generator& g : letters_) d = std::max(d, g.degree());
  return d;
}

std::size_t GroupWord::hash() const noexcept {
  std::size_t h = static_cast<std::size_t>(m_);
  for (const Generator& g : letters_) h = mix(h, g.hash());
  return h;
}

}  // namespace mg
