#include "mothergraph/perm.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mothergraph/errors.hpp"

namespace mg {

namespace {

void check_alphabet(int m) {
  if (m < 1 || m > kMaxAlphabet) {
    throw InvalidArgument("alphabet size " + std::to_string(m) +
                          " outside 1.." + std::to_string(kMaxAlphabet));
  }
}

}  // namespace

Perm Perm::identity(int m) {
  check_alphabet(m);
  Perm p;
  p.size_ = static_cast<std::uint8_t>(m);
  for (int i = 0; i < m; ++i) p.images_[i] = static_cast<Digit>(i);
  return p;
}

Perm Perm::from_images(std::span<const int> images) {
  const int m = static_cast<int>(images.size());
  check_alphabet(m);
  Perm p;
  p.size_ = static_cast<std::uint8_t>(m);
  std::array<bool, kMaxAlphabet> seen{};
  for (int i = 0; i < m; ++i) {
    const int x = images[i];
    if (x < 0 || x >= m || seen[x]) {
      throw InvalidArgument("permutation images are not a bijection");
    }
    seen[x] = true;
    p.images_[i] = static_cast<Digit>(x);
  }
  return p;
}

Perm Perm::transposition(int m, int a, int b) {
  Perm p = identity(m);
  if (a < 0 || a >= m || b < 0 || b >= m) {
    throw InvalidArgument("transposition point outside alphabet");
  }
  std::swap(p.images_[a], p.images_[b]);
  return p;
}

Perm Perm::cycle(int m) {
  Perm p = identity(m);
  for (int i = 0; i < m; ++i) p.images_[i] = static_cast<Digit>((i + 1) % m);
  return p;
}

std::vector<Perm> Perm::all(int m) {
  check_alphabet(m);
  std::vector<int> images(m);
  std::iota(images.begin(), images.end(), 0);
  std::vector<Perm> out;
  do {
    out.push_back(from_images(images));
  } while (std::next_permutation(images.begin(), images.end()));
  return out;
}

std::vector<Perm> Perm::all_fixing_zero(int m) {
  std::vector<Perm> out;
  for (const Perm& p : all(m)) {
    if (p.fixes(0)) out.push_back(p);
  }
  return out;
}

Perm Perm::operator*(const Perm& then) const {
  Perm p;
  p.size_ = size_;
  for (int i = 0; i < size_; ++i) p.images_[i] = then.images_[images_[i]];
  return p;
}

Perm Perm::inverse() const {
  Perm p;
  p.size_ = size_;
  for (int i = 0; i < size_; ++i) p.images_[images_[i]] = static_cast<Digit>(i);
  return p;
}

bool Perm::is_identity() const noexcept {
  for (int i = 0; i < size_; ++i) {
    if (images_[i] != i) return false;
  }
  return true;
}

std::size_t Perm::hash() const noexcept {
  std::size_t h = size_;
  for (int i = 0; i < size_; ++i) h = h * 31 + images_[i];
  return h;
}

}  // namespace mg
