#include "mothergraph/tokens.hpp"

#include <array>
#include <vector>

#include "mothergraph/errors.hpp"

namespace mg {

namespace {

// Parses cycle notation starting at text[0]; `base` is the offset of `text`
// inside the full token, used for error positions.
Perm parse_cycles(std::string_view text, int m, std::size_t base) {
  if (text.empty()) throw ParseError("expected a permutation", base);
  std::array<int, kMaxAlphabet> images{};
  for (int i = 0; i < m; ++i) images[i] = i;
  std::array<bool, kMaxAlphabet> used{};
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '(') throw ParseError("expected '('", base + i);
    ++i;
    std::vector<int> cycle;
    while (i < text.size() && text[i] != ')') {
      const char c = text[i];
      if (c < '0' || c > '9' || c - '0' >= m) {
        throw ParseError("invalid letter in cycle", base + i);
      }
      const int x = c - '0';
      if (used[x]) throw ParseError("letter repeated in cycles", base + i);
      used[x] = true;
      cycle.push_back(x);
      ++i;
    }
    if (i == text.size()) throw ParseError("unterminated cycle", base + i);
    ++i;
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      images[cycle[k]] = cycle[(k + 1) % cycle.size()];
    }
  }
  return Perm::from_images(std::span<const int>(images.data(), static_cast<std::size_t>(m)));
}

}  // namespace

std::string format_perm(const Perm& p) {
  std::string out;
  std::array<bool, kMaxAlphabet> seen{};
  for (int start = 0; start < p.size(); ++start) {
    if (seen[start] || p[start] == start) continue;
    out.push_back('(');
    for (int x = start; !seen[x]; x = p[x]) {
      seen[x] = true;
      out.push_back(static_cast<char>('0' + x));
    }
    out.push_back(')');
  }
  return out.empty() ? "()" : out;
}

Perm parse_perm(std::string_view text, int m) {
  if (m < 2 || m > kMaxAlphabet) throw InvalidArgument("alphabet size outside 2..8");
  return parse_cycles(text, m, 0);
}

std::string format_generator(const Generator& g) {
  if (g.is_root_perm()) return "rho:" + format_perm(g.perm());
  std::string out = "lam:";
  const auto trig = g.trigger();
  for (auto it = trig.rbegin(); it != trig.rend(); ++it) out.push_back(static_cast<char>('0' + *it));
  out += ":" + format_perm(g.elem().pi) + ":";
  for (int a = 1; a < g.alphabet(); ++a) {
    if (a > 1) out.push_back(',');
    out += format_perm(g.elem().taus[a]);
  }
  return out;
}

Generator parse_generator(std::string_view text, int m) {
  if (m < 2 || m > kMaxAlphabet) throw InvalidArgument("alphabet size outside 2..8");
  if (text.starts_with("rho:")) return Generator::root_perm(parse_cycles(text.substr(4), m, 4));
  if (!text.starts_with("lam:")) throw ParseError("expected 'rho:' or 'lam:'", 0);

  std::size_t pos = 4;
  const std::size_t c1 = text.find(':', pos);
  if (c1 == std::string_view::npos) throw ParseError("missing ':' after trigger", text.size());
  std::vector<Digit> trigger;
  for (std::size_t i = c1; i > pos; --i) {
    const char c = text[i - 1];
    if (c < '1' || c > '9' || c - '0' >= m) {
      throw ParseError("trigger letters must lie in 1..m-1", i - 1);
    }
    trigger.push_back(static_cast<Digit>(c - '0'));
  }
  if (trigger.size() > static_cast<std::size_t>(kMaxTrigger)) {
    throw ParseError("trigger too long", pos);
  }
  pos = c1 + 1;
  const std::size_t c2 = text.find(':', pos);
  if (c2 == std::string_view::npos) throw ParseError("missing ':' after pi", text.size());
  WreathElem e = WreathElem::identity(m);
  e.pi = parse_cycles(text.substr(pos, c2 - pos), m, pos);
  if (!e.pi.fixes(0)) throw ParseError("pi must fix 0", pos);
  pos = c2 + 1;
  for (int a = 1; a < m; ++a) {
    std::size_t end = text.find(',', pos);
    if (a == m - 1) {
      if (end != std::string_view::npos) throw ParseError("too many tau entries", end);
      end = text.size();
    } else if (end == std::string_view::npos) {
      throw ParseError("expected " + std::to_string(m - 1) + " tau entries", text.size());
    }
    e.taus[a] = parse_cycles(text.substr(pos, end - pos), m, pos);
    pos = end + 1;
  }
  return Generator::lambda(trigger, e);
}

std::string format_word(const GroupWord& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out.push_back(';');
    out += format_generator(w[i]);
  }
  return out;
}

GroupWord parse_word(std::string_view text, int m) {
  GroupWord w(m);
  if (text.empty()) return w;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = text.find(';', pos);
    const std::string_view tok = text.substr(pos, end == std::string_view::npos ? end : end - pos);
    try {
      w.push_back(parse_generator(tok, m));
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), pos + e.position());
    }
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return w;
}

}  // namespace mg
