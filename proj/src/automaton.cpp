#include "mothergraph/automaton.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "mothergraph/errors.hpp"

namespace mg {

void apply_generator(const Generator& g, std::span<Digit> word, ActionMode mode) {
  const std::size_t n = word.size();
  if (n == 0) return;
  if (g.is_root_perm()) {
    word[0] = g.perm()(word[0]);
    return;
  }
  const auto trigger = g.trigger();
  std::size_t matched = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Digit c = word[i];
    if (c == 0) continue;
    if (matched < trigger.size()) {
      if (c != trigger[matched]) return;
      ++matched;
      continue;
    }
    if (i + 1 < n) {
      word[i + 1] = g.elem().taus[c](word[i + 1]);
    } else if (mode == ActionMode::Truncated) {
      return;
    }
    word[i] = g.elem().pi(c);
    return;
  }
}

LetterWord act(const GroupWord& g, const LetterWord& v) {
  if (g.alphabet() != v.alphabet()) throw InvalidArgument("alphabet mismatch between word and element");
  LetterWord out = v;
  for (const Generator& s : g.letters()) apply_generator(s, out.digits(), ActionMode::Tree);
  return out;
}

GroupWord section(const GroupWord& g, const LetterWord& v) {
  if (g.alphabet() != v.alphabet()) throw InvalidArgument("alphabet mismatch between word and element");
  std::vector<Digit> cur(v.digits().begin(), v.digits().end());
  GroupWord out(g.alphabet());
  for (const Generator& s : g.letters()) {
    std::optional<Generator> state = s;
    for (Digit& x : cur) {
      if (!state) break;
      const Digit in = x;
      x = state->top()(in);
      state = state->section_at(in);
    }
    if (state) out.push_back(*state);
  }
  return out.reduced();
}

Perm root_perm(const GroupWord& g) {
  Perm p = Perm::identity(g.alphabet());
  for (const Generator& s : g.letters()) p = p * s.top();
  return p;
}

std::string ActivityDegree::to_string() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::Exponential: return "exponential";
    case Kind::Finite: return std::to_string(value);
  }
  return "?";
}

namespace {

constexpr std::uint32_t kIdentity = std::numeric_limits<std::uint32_t>::max();

using IdWord = std::vector<std::uint32_t>;

struct IdWordHash {
  std::size_t operator()(const IdWord& w) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (std::uint32_t x : w) h = (h ^ x) * 1099511628211ULL;
    return h;
  }
};

// Interns every generator reachable by sections so that closure states are
// plain integer vectors.
class GeneratorTable {
 public:
  explicit GeneratorTable(int m) : m_(m) {}

  std::uint32_t intern(const Generator& g) {
    if (g.is_trivial()) return kIdentity;
    if (auto it = index_.find(g); it != index_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(gens_.size());
    gens_.push_back(g);
    tops_.push_back(g.top());
    sections_.emplace_back();
    sections_.back().fill(kIdentity);
    index_.emplace(g, id);
    for (int x = 0; x < m_; ++x) {
      const auto sec = g.section_at(static_cast<Digit>(x));
      const std::uint32_t sid = sec ? intern(*sec) : kIdentity;
      sections_[id][x] = sid;
    }
    return id;
  }

  const Generator& generator(std::uint32_t id) const { return gens_[id]; }
  const Perm& top(std::uint32_t id) const { return tops_[id]; }
  std::uint32_t section(std::uint32_t id, Digit x) const { return sections_[id][x]; }

  // Appends `id` to a reduced word, fusing with the last letter if possible.
  void push_reduced(IdWord& w, std::uint32_t id) {
    if (id == kIdentity) return;
    if (!w.empty() && gens_[w.back()].same_factor(gens_[id])) {
      const std::uint64_t key = (static_cast<std::uint64_t>(w.back()) << 32) | id;
      std::uint32_t fused;
      if (auto it = fuse_cache_.find(key); it != fuse_cache_.end()) {
        fused = it->second;
      } else {
        fused = intern(gens_[w.back()].fused_with(gens_[id]));
        fuse_cache_.emplace(key, fused);
      }
      w.pop_back();
      push_reduced(w, fused);
      return;
    }
    w.push_back(id);
  }

  IdWord encode(const GroupWord& g) {
    IdWord w;
    for (const Generator& s : g.letters()) push_reduced(w, intern(s));
    return w;
  }

  GroupWord decode(const IdWord& w) const {
    GroupWord g(m_);
    for (std::uint32_t id : w) g.push_back(gens_[id]);
    return g;
  }

  int alphabet() const noexcept { return m_; }

 private:
  int m_;
  std::vector<Generator> gens_;
  std::vector<Perm> tops_;
  std::vector<std::array<std::uint32_t, kMaxAlphabet>> sections_;
  std::unordered_map<Generator, std::uint32_t, GeneratorHash> index_;
  std::unordered_map<std::uint64_t, std::uint32_t> fuse_cache_;
};

struct Closure {
  std::vector<IdWord> states;
  std::vector<Perm> tops;
  std::vector<std::array<int, kMaxAlphabet>> targets;
  bool saw_nontrivial_top = false;
};

// Breadth-first closure of {start} under first-level sections. When
// `stop_on_nontrivial` is set the search ends at the first state whose root
// permutation is nontrivial (enough to refute the identity).
Closure section_closure(GeneratorTable& table, const IdWord& start, std::size_t cap,
                        bool stop_on_nontrivial) {
  const int m = table.alphabet();
  Closure c;
  std::unordered_map<IdWord, int, IdWordHash> index;
  c.states.push_back(start);
  index.emplace(start, 0);
  IdWord next;
  for (std::size_t s = 0; s < c.states.size(); ++s) {
    Perm top = Perm::identity(m);
    for (std::uint32_t id : c.states[s]) top = top * table.top(id);
    c.tops.push_back(top);
    if (!top.is_identity()) {
      c.saw_nontrivial_top = true;
      if (stop_on_nontrivial) return c;
    }
    std::array<int, kMaxAlphabet> tgt{};
    for (int x = 0; x < m; ++x) {
      next.clear();
      Digit letter = static_cast<Digit>(x);
      for (std::uint32_t id : c.states[s]) {
        table.push_reduced(next, table.section(id, letter));
        letter = table.top(id)(letter);
      }
      auto [it, inserted] = index.emplace(next, static_cast<int>(c.states.size()));
      if (inserted) {
        if (c.states.size() >= cap) throw CapExceeded("section closure exceeded its cap", cap);
        c.states.push_back(next);
      }
      tgt[x] = it->second;
    }
    c.targets.push_back(tgt);
  }
  return c;
}

// Active = can reach a state with nontrivial root permutation.
std::vector<bool> active_states(const Closure& c, int m) {
  const std::size_t n = c.states.size();
  std::vector<std::vector<int>> reverse(n);
  for (std::size_t s = 0; s < n; ++s) {
    for (int x = 0; x < m; ++x) reverse[c.targets[s][x]].push_back(static_cast<int>(s));
  }
  std::vector<bool> active(n, false);
  std::vector<int> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (!c.tops[s].is_identity()) {
      active[s] = true;
      stack.push_back(static_cast<int>(s));
    }
  }
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (int p : reverse[s]) {
      if (!active[p]) {
        active[p] = true;
        stack.push_back(p);
      }
    }
  }
  return active;
}

ActivityDegree degree_from_graph(const std::vector<std::vector<int>>& succ,
                                 const std::vector<bool>& active) {
  const int n = static_cast<int>(succ.size());
  if (std::none_of(active.begin(), active.end(), [](bool a) { return a; })) {
    return ActivityDegree::none();
  }
  // Iterative Tarjan restricted to active states.
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  int counter = 0, ncomp = 0;
  struct Frame {
    int v;
    std::size_t edge;
  };
  for (int root = 0; root < n; ++root) {
    if (!active[root] || index[root] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.edge < succ[f.v].size()) {
        const int w = succ[f.v][f.edge++];
        if (!active[w]) continue;
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const int v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = ncomp;
        } while (w != v);
        ++ncomp;
      }
    }
  }
  // Per component: vertices and internal edges (letters counted separately).
  std::vector<long> comp_vertices(ncomp, 0), comp_edges(ncomp, 0);
  for (int v = 0; v < n; ++v) {
    if (comp[v] < 0) continue;
    ++comp_vertices[comp[v]];
    for (int w : succ[v]) {
      if (comp[w] == comp[v]) ++comp_edges[comp[v]];
    }
  }
  std::vector<int> cyclic(ncomp, 0);
  for (int k = 0; k < ncomp; ++k) {
    if (comp_edges[k] > comp_vertices[k]) return ActivityDegree::exponential();
    cyclic[k] = comp_edges[k] > 0 ? 1 : 0;
  }
  // Tarjan emits components in reverse topological order, so successors of a
  // component always carry a smaller id.
  std::vector<int> best(ncomp, 0);
  for (int k = 0; k < ncomp; ++k) best[k] = cyclic[k];
  std::vector<std::vector<int>> members(ncomp);
  for (int v = 0; v < n; ++v) {
    if (comp[v] >= 0) members[comp[v]].push_back(v);
  }
  int overall = 0;
  for (int k = 0; k < ncomp; ++k) {
    int down = 0;
    for (int v : members[k]) {
      for (int w : succ[v]) {
        if (comp[w] >= 0 && comp[w] != k) down = std::max(down, best[comp[w]]);
      }
    }
    best[k] = cyclic[k] + down;
    overall = std::max(overall, best[k]);
  }
  return ActivityDegree::finite(overall - 1);
}

std::vector<std::vector<int>> successor_lists(const Closure& c, int m) {
  std::vector<std::vector<int>> succ(c.states.size());
  for (std::size_t s = 0; s < c.states.size(); ++s) {
    for (int x = 0; x < m; ++x) succ[s].push_back(c.targets[s][x]);
  }
  return succ;
}

}  // namespace

bool is_identity(const GroupWord& g, std::size_t cap) {
  GeneratorTable table(g.alphabet());
  const IdWord start = table.encode(g);
  if (start.empty()) return true;
  return !section_closure(table, start, cap, true).saw_nontrivial_top;
}

bool equal(const GroupWord& g, const GroupWord& h, std::size_t cap) {
  return is_identity(g * h.inverse(), cap);
}

MooreDiagram build_moore_diagram(const GroupWord& g, std::size_t cap) {
  const int m = g.alphabet();
  GeneratorTable table(m);
  const Closure c = section_closure(table, table.encode(g), cap, false);
  MooreDiagram dg;
  dg.alphabet = m;
  dg.active = active_states(c, m);
  for (std::size_t s = 0; s < c.states.size(); ++s) {
    dg.states.push_back(table.decode(c.states[s]));
    std::vector<MooreDiagram::Edge> row;
    for (int x = 0; x < m; ++x) {
      row.push_back({c.tops[s](static_cast<Digit>(x)), c.targets[s][x]});
    }
    dg.edges.push_back(std::move(row));
  }
  return dg;
}

ActivityDegree activity_degree(const MooreDiagram& dg) {
  std::vector<std::vector<int>> succ(dg.size());
  for (std::size_t s = 0; s < dg.size(); ++s) {
    for (const auto& e : dg.edges[s]) succ[s].push_back(e.target);
  }
  return degree_from_graph(succ, dg.active);
}

ActivityDegree activity_degree(const GroupWord& g, std::size_t cap) {
  GeneratorTable table(g.alphabet());
  const Closure c = section_closure(table, table.encode(g), cap, false);
  return degree_from_graph(successor_lists(c, g.alphabet()), active_states(c, g.alphabet()));
}

std::vector<std::uint64_t> activity_counts(const MooreDiagram& dg, int max_level) {
  if (max_level < 0) throw InvalidArgument("level must be nonnegative");
  // Every count is at most m^level; refuse levels that could overflow.
  long double bound = 1;
  for (int i = 0; i < max_level; ++i) bound *= dg.alphabet;
  if (bound > 9.0e18L) throw InvalidArgument("activity count would overflow 64 bits");
  const std::size_t n = dg.size();
  std::vector<std::uint64_t> cur(n), next(n);
  for (std::size_t s = 0; s < n; ++s) cur[s] = dg.active[s] ? 1 : 0;
  std::vector<std::uint64_t> out{cur[0]};
  for (int level = 1; level <= max_level; ++level) {
    for (std::size_t s = 0; s < n; ++s) {
      std::uint64_t total = 0;
      for (const auto& e : dg.edges[s]) total += cur[e.target];
      next[s] = total;
    }
    std::swap(cur, next);
    out.push_back(cur[0]);
  }
  return out;
}

std::uint64_t activity_count(const GroupWord& g, int level, std::size_t cap) {
  return activity_counts(build_moore_diagram(g, cap), level).back();
}

ActivityDegree empirical_activity_degree(const std::vector<std::uint64_t>& counts) {
  const std::size_t n = counts.size();
  if (n >= 2 && counts[n - 1] == 0 && counts[n - 2] == 0) return ActivityDegree::finite(-1);
  std::vector<double> diff(counts.begin(), counts.end());
  // diff holds the k-th differences; two vanishing (k+1)st differences at the
  // end fix the degree.
  for (std::size_t k = 0; k + 3 <= n; ++k) {
    std::vector<double> next(diff.size() - 1);
    for (std::size_t i = 0; i + 1 < diff.size(); ++i) next[i] = diff[i + 1] - diff[i];
    const std::size_t len = next.size();
    if (len >= 2 && next[len - 1] == 0 && next[len - 2] == 0 && diff.back() != 0) {
      return ActivityDegree::finite(static_cast<int>(k));
    }
    diff = std::move(next);
  }
  if (n >= 3 && counts[n - 2] > 0 && static_cast<double>(counts[n - 1]) >= 1.5 * static_cast<double>(counts[n - 2])) {
    return ActivityDegree::exponential();
  }
  return ActivityDegree::none();
}

}  // namespace mg
