#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "autostack/errors.hpp"
#include "autostack/fsa.hpp"
#include "autostack/words.hpp"

namespace autostack {

struct Rule {
  Word lhs;
  Word rhs;
};

// String rewriting system presenting a group as a quotient of the free monoid
// on an inverse-closed alphabet. Termination is assumed, not verified; local
// confluence is checkable via critical pairs.
struct RewritingSystem {
  Alphabet alphabet;
  std::vector<Rule> rules;

  void validate() const {
    for (const Rule& r : rules) {
      if (r.lhs.empty()) raise("MalformedSystem", "rewriting rule with empty left side");
      for (LetterId x : cat(r.lhs, r.rhs))
        if (x < 0 || x >= alphabet.size()) raise("UnknownLetter", "rule uses letter outside alphabet");
    }
  }
};

// Leftmost position, then declaration order. nullopt when irreducible.
inline std::optional<std::pair<size_t, size_t>> find_redex(const RewritingSystem& rs, const Word& w) {
  for (size_t pos = 0; pos < w.size(); ++pos)
    for (size_t ri = 0; ri < rs.rules.size(); ++ri) {
      const Word& lhs = rs.rules[ri].lhs;
      if (pos + lhs.size() > w.size()) continue;
      if (std::equal(lhs.begin(), lhs.end(), w.begin() + static_cast<std::ptrdiff_t>(pos)))
        return std::make_pair(pos, ri);
    }
  return std::nullopt;
}

inline bool is_irreducible(const RewritingSystem& rs, const Word& w) {
  return !find_redex(rs, w).has_value();
}

inline Word apply_rule_at(const RewritingSystem& rs, const Word& w, size_t pos, size_t rule) {
  const Rule& r = rs.rules[rule];
  Word out(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(pos));
  out.insert(out.end(), r.rhs.begin(), r.rhs.end());
  out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(pos + r.lhs.size()), w.end());
  return out;
}

inline Word rewrite_to_irreducible(const RewritingSystem& rs, Word w, long long step_cap = 1000) {
  for (long long steps = 0;; ++steps) {
    auto redex = find_redex(rs, w);
    if (!redex) return w;
    if (steps >= step_cap)
      raise("StepLimitExceeded", "rewriting did not reach an irreducible word within " +
                                     std::to_string(step_cap) + " steps");
    w = apply_rule_at(rs, w, redex->first, redex->second);
  }
}

struct CriticalPair {
  Word source;
  Word left;   // irreducible form via the first rewrite
  Word right;  // irreducible form via the second rewrite
};

// Overlap and containment ambiguities; a pair is returned only when the two
// sides rewrite to different irreducible words.
inline std::vector<CriticalPair> unjoinable_critical_pairs(const RewritingSystem& rs,
                                                           long long step_cap = 1000) {
  std::vector<CriticalPair> bad;
  auto consider = [&](const Word& source, const Word& a, const Word& b) {
    Word na = rewrite_to_irreducible(rs, a, step_cap);
    Word nb = rewrite_to_irreducible(rs, b, step_cap);
    if (na != nb) bad.push_back({source, na, nb});
  };
  for (size_t i = 0; i < rs.rules.size(); ++i)
    for (size_t j = 0; j < rs.rules.size(); ++j) {
      const Word &li = rs.rules[i].lhs, &lj = rs.rules[j].lhs;
      // proper suffix of li equals proper prefix of lj
      for (size_t k = 1; k < li.size() && k < lj.size(); ++k) {
        if (!std::equal(lj.begin(), lj.begin() + static_cast<std::ptrdiff_t>(k),
                        li.end() - static_cast<std::ptrdiff_t>(k)))
          continue;
        Word source = cat(li, suffix_from(lj, k));
        Word a = cat(rs.rules[i].rhs, suffix_from(lj, k));
        Word b = cat(prefix(li, li.size() - k), rs.rules[j].rhs);
        consider(source, a, b);
      }
      // lj contained in li
      if (i != j && lj.size() <= li.size()) {
        for (size_t p = 0; p + lj.size() <= li.size(); ++p) {
          if (!std::equal(lj.begin(), lj.end(), li.begin() + static_cast<std::ptrdiff_t>(p)))
            continue;
          Word b = cat(cat(prefix(li, p), rs.rules[j].rhs), suffix_from(li, p + lj.size()));
          consider(li, rs.rules[i].rhs, b);
        }
      }
    }
  return bad;
}

// Acceptor of the irreducible words: complement of Sigma* lhs Sigma*.
inline Fsa irreducible_words_fsa(const RewritingSystem& rs) {
  int n = rs.alphabet.size();
  Fsa sigma = Fsa::sigma_star(n);
  std::vector<Fsa> parts;
  for (const Rule& r : rs.rules)
    parts.push_back(concat(concat(sigma, Fsa::single_word(n, r.lhs)), sigma));
  if (parts.empty()) return minimize(sigma);
  return minimize(complement(unite_many(parts)));
}

// For irreducible y with ya reducible and the edge not in the spanning tree:
// every redex of ya is a suffix s.a matching some rule; pick the shortest such
// suffix (ties by declaration order) and return invert(s).rhs.
inline Word suffix_rule_value(const RewritingSystem& rs, const Word& y, LetterId a) {
  Word ya = cat(y, Word{a});
  for (size_t slen = 0; slen + 1 <= ya.size(); ++slen) {
    for (const Rule& r : rs.rules) {
      if (r.lhs.size() != slen + 1) continue;
      if (!std::equal(r.lhs.begin(), r.lhs.end(), ya.end() - static_cast<std::ptrdiff_t>(slen + 1)))
        continue;
      Word s(ya.end() - static_cast<std::ptrdiff_t>(slen + 1), ya.end() - 1);
      return cat(invert(rs.alphabet, s), r.rhs);
    }
  }
  raise("NoApplicableRule", "no rule rewrites the suffix of '" + format_word(rs.alphabet, ya) + "'");
}

}  // namespace autostack
