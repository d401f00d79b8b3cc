#pragma once

// Independent reference implementations used only by the tests. They avoid
// the library's closure engine and solver so that agreement is meaningful.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mothergraph/mother.hpp"

namespace oracle {

using mg::Digit;
using mg::GroupWord;
using mg::LetterWord;

inline std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Action of a word through the verbal generator semantics.
inline LetterWord direct_word_action(const GroupWord& g, LetterWord v) {
  for (const auto& s : g.letters()) v = mg::direct_action(s, v);
  return v;
}

inline void for_each_word(int m, int n, const std::function<void(const LetterWord&)>& f) {
  const std::uint64_t total = ipow(static_cast<std::uint64_t>(m), n);
  for (std::uint64_t x = 0; x < total; ++x) f(LetterWord::from_value(x, n, m));
}

// g acts trivially on every word of length `depth`.
inline bool trivial_to_depth(const GroupWord& g, int depth) {
  bool ok = true;
  for_each_word(g.alphabet(), depth, [&](const LetterWord& v) {
    if (ok && !(direct_word_action(g, v) == v)) ok = false;
  });
  return ok;
}

inline bool equal_to_depth(const GroupWord& g, const GroupWord& h, int depth) {
  bool ok = true;
  for_each_word(g.alphabet(), depth, [&](const LetterWord& v) {
    if (ok && !(direct_word_action(g, v) == direct_word_action(h, v))) ok = false;
  });
  return ok;
}

// Number of level-n vertices v whose section is nontrivial, judged by acting
// on every extension vw with |w| = extra. Exact once `extra` exceeds the depth
// at which the sections act nontrivially.
inline std::uint64_t brute_activity_count(const GroupWord& g, int n, int extra) {
  const int m = g.alphabet();
  std::uint64_t count = 0;
  for_each_word(m, n, [&](const LetterWord& v) {
    bool nontrivial = false;
    for_each_word(m, extra, [&](const LetterWord& w) {
      if (nontrivial) return;
      std::vector<Digit> vw(v.digits().begin(), v.digits().end());
      vw.insert(vw.end(), w.digits().begin(), w.digits().end());
      const LetterWord out = direct_word_action(g, LetterWord(m, vw));
      for (int i = 0; i < extra; ++i) {
        if (out.digits()[n + i] != w.digits()[i]) nontrivial = true;
      }
    });
    if (nontrivial) ++count;
  });
  return count;
}

inline GroupWord random_word(const mg::GeneratorMultiset& ms, int max_len, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, ms.size() - 1);
  GroupWord w(ms.params.m);
  const int l = len(rng);
  for (int i = 0; i < l; ++i) w.push_back(ms.generators[pick(rng)]);
  return w;
}

// Effective resistance through the Moore-Penrose pseudoinverse of a dense
// Laplacian; conductance(u, v) supplies the edge weights.
inline Eigen::MatrixXd dense_laplacian(int n, const std::function<double(int, int)>& conductance) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double c = conductance(u, v);
      if (c == 0) continue;
      L(u, v) -= c;
      L(v, u) -= c;
      L(u, u) += c;
      L(v, v) += c;
    }
  }
  return L;
}

inline Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& L) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  const auto& vals = es.eigenvalues();
  Eigen::VectorXd inv(vals.size());
  const double cutoff = 1e-9 * vals.cwiseAbs().maxCoeff();
  for (int i = 0; i < vals.size(); ++i) inv[i] = std::abs(vals[i]) > cutoff ? 1.0 / vals[i] : 0.0;
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

inline double pinv_resistance(const Eigen::MatrixXd& Lplus, int a, int b) {
  return Lplus(a, a) + Lplus(b, b) - 2 * Lplus(a, b);
}

}  // namespace oracle
