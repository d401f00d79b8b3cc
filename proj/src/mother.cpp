#include "mothergraph/mother.hpp"

#include <unordered_map>

#include "mothergraph/errors.hpp"
#include "mothergraph/tokens.hpp"

namespace mg {

namespace {

std::uint64_t factorial(int m) {
  std::uint64_t f = 1;
  for (int i = 2; i <= m; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

void check_degree(int k) {
  if (k < -1 || k > kMaxTrigger) throw InvalidArgument("degree outside -1.." + std::to_string(kMaxTrigger));
}

}  // namespace

void ModelParams::validate() const {
  if (m < 2 || m > kMaxAlphabet) throw InvalidArgument("m must lie in 2..8");
  if (d < 0 || d > kMaxTrigger) throw InvalidArgument("d must lie in 0.." + std::to_string(kMaxTrigger));
}

Generator make_alpha(int k, const Perm& sigma) {
  check_degree(k);
  if (k == -1) return Generator::root_perm(sigma);
  WreathElem e = WreathElem::identity(sigma.size());
  e.taus[1] = sigma;
  const std::vector<Digit> trigger(static_cast<std::size_t>(k), 1);
  return Generator::lambda(trigger, e);
}

Generator make_beta(int k, const Perm& rho) {
  check_degree(k);
  if (k < 0) throw InvalidArgument("beta needs k >= 0");
  if (!rho.fixes(0)) throw InvalidArgument("beta permutation must fix 0");
  WreathElem e = WreathElem::identity(rho.size());
  e.pi = rho;
  const std::vector<Digit> trigger(static_cast<std::size_t>(k), 1);
  return Generator::lambda(trigger, e);
}

LetterWord direct_action(const Generator& g, const LetterWord& v) {
  if (g.alphabet() != v.alphabet()) throw InvalidArgument("alphabet mismatch");
  std::vector<Digit> out(v.digits().begin(), v.digits().end());
  if (out.empty()) return v;
  if (g.is_root_perm()) {
    out[0] = g.perm()(out[0]);
    return LetterWord(v.alphabet(), std::move(out));
  }
  // Positions of the nonzero letters, in reading order.
  std::vector<std::size_t> nonzero;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] != 0) nonzero.push_back(i);
  }
  const auto trigger = g.trigger();
  if (nonzero.size() <= trigger.size()) return v;
  for (std::size_t j = 0; j < trigger.size(); ++j) {
    if (out[nonzero[j]] != trigger[j]) return v;
  }
  const std::size_t target = nonzero[trigger.size()];
  const Digit letter = out[target];
  out[target] = g.elem().pi(letter);
  if (target + 1 < out.size()) out[target + 1] = g.elem().taus[letter](out[target + 1]);
  return LetterWord(v.alphabet(), std::move(out));
}

std::vector<std::vector<Digit>> all_triggers(int k, int m) {
  std::vector<std::vector<Digit>> out;
  std::vector<Digit> w(static_cast<std::size_t>(k), 1);
  while (true) {
    out.push_back(w);
    int pos = k - 1;
    while (pos >= 0 && w[pos] == m - 1) w[pos--] = 1;
    if (pos < 0) break;
    ++w[pos];
  }
  return out;
}

std::size_t GeneratorMultiset::block_index(int k, std::span<const Digit> trigger) const {
  if (k < 0) return 0;
  const std::size_t base = static_cast<std::size_t>(params.m - 1);
  std::size_t offset = 1, pow = 1;
  for (int j = 0; j < k; ++j) {
    offset += pow;
    pow *= base;
  }
  std::size_t code = 0;
  for (Digit x : trigger) code = code * base + (x - 1);
  return offset + code;
}

GeneratorMultiset enumerate_generating_multiset(const ModelParams& p) {
  p.validate();
  GeneratorMultiset ms;
  ms.params = p;
  GeneratorBlock root;
  root.begin = 0;
  for (const Perm& s : Perm::all(p.m)) ms.generators.push_back(Generator::root_perm(s));
  root.end = ms.generators.size();
  ms.blocks.push_back(root);

  const std::vector<WreathElem> elems = WreathElem::all(p.m);
  for (int k = 0; k <= p.d; ++k) {
    for (const auto& w : all_triggers(k, p.m)) {
      GeneratorBlock b;
      b.degree = k;
      b.trigger = w;
      b.begin = ms.generators.size();
      for (const WreathElem& e : elems) ms.generators.push_back(Generator::lambda(w, e));
      b.end = ms.generators.size();
      ms.blocks.push_back(std::move(b));
    }
  }

  std::unordered_map<Generator, std::size_t, GeneratorHash> index;
  for (std::size_t i = 0; i < ms.generators.size(); ++i) index.emplace(ms.generators[i], i);
  ms.inverse.resize(ms.generators.size());
  for (std::size_t i = 0; i < ms.generators.size(); ++i) {
    ms.inverse[i] = index.at(ms.generators[i].inverse());
  }
  return ms;
}

std::uint64_t generating_multiset_size(const ModelParams& p) {
  p.validate();
  const std::uint64_t per_block = factorial(p.m - 1) * ipow(factorial(p.m), p.m - 1);
  std::uint64_t total = factorial(p.m);
  for (int k = 0; k <= p.d; ++k) total += ipow(static_cast<std::uint64_t>(p.m - 1), k) * per_block;
  return total;
}

std::uint64_t mother_state_count(const ModelParams& p) {
  p.validate();
  return factorial(p.m) * static_cast<std::uint64_t>(p.d + 1) +
         factorial(p.m - 1) * static_cast<std::uint64_t>(p.d);
}

GroupWord sample_level_subgroup(int k, const ModelParams& p, std::mt19937_64& rng) {
  p.validate();
  if (k < -1 || k > p.d) throw InvalidArgument("level outside -1..d");
  GroupWord w(p.m);
  const std::vector<Perm> perms = Perm::all(p.m);
  if (k == -1) {
    std::uniform_int_distribution<std::size_t> pick(0, perms.size() - 1);
    w.push_back(Generator::root_perm(perms[pick(rng)]));
    return w;
  }
  const std::vector<Perm> pis = Perm::all_fixing_zero(p.m);
  std::uniform_int_distribution<std::size_t> pick_pi(0, pis.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_tau(0, perms.size() - 1);
  for (const auto& trig : all_triggers(k, p.m)) {
    WreathElem e = WreathElem::identity(p.m);
    e.pi = pis[pick_pi(rng)];
    for (int a = 1; a < p.m; ++a) e.taus[a] = perms[pick_tau(rng)];
    w.push_back(Generator::lambda(trig, e));
  }
  return w;
}

std::vector<GroupWord> enumerate_subgroup_elements(std::span<const Digit> trigger,
                                                   const ModelParams& p, std::size_t cap) {
  p.validate();
  if (p.m > 3) throw InvalidArgument("subgroup enumeration limited to m <= 3");
  std::vector<GroupWord> distinct;
  for (const WreathElem& e : WreathElem::all(p.m)) {
    const GroupWord g = GroupWord::of(Generator::lambda(trigger, e));
    bool seen = false;
    for (const GroupWord& h : distinct) {
      if (equal(g, h, cap)) {
        seen = true;
        break;
      }
    }
    if (!seen) distinct.push_back(g);
  }
  return distinct;
}

std::string dump_multiset(const GeneratorMultiset& ms) {
  std::string out;
  for (const GeneratorBlock& b : ms.blocks) {
    out += "# degree=" + std::to_string(b.degree) + " trigger=";
    for (auto it = b.trigger.rbegin(); it != b.trigger.rend(); ++it) out.push_back(static_cast<char>('0' + *it));
    out.push_back('\n');
    for (std::size_t i = b.begin; i < b.end; ++i) {
      out += format_generator(ms.generators[i]);
      out.push_back('\n');
    }
  }
  return out;
}

}  // namespace mg
