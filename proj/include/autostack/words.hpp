#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "autostack/errors.hpp"

namespace autostack {

using LetterId = int;

// A word is a sequence of letter ids into some Alphabet. Letter order (used by
// shortlex and by automaton enumeration) is declaration order.
using Word = std::vector<LetterId>;

// Inverse-closed alphabet. Every letter has an inverse letter; a letter may be
// its own inverse (order-2 generators). Immutable once built.
class Alphabet {
 public:
  Alphabet() = default;

  // Letters in declaration order, each entry (name, inverse_name). Both names
  // of a pair are added when first seen, so {"a","a^-1"} adds two letters.
  static Alphabet from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
    Alphabet a;
    for (const auto& [n, inv] : pairs) a.add_pair(n, inv);
    a.check();
    return a;
  }

  // Convention helper: for each base name "x" adds the pair "x", "x^-1".
  static Alphabet with_inverses(const std::vector<std::string>& base) {
    Alphabet a;
    for (const auto& n : base) a.add_pair(n, n + "^-1");
    a.check();
    return a;
  }

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(LetterId i) const { return names_.at(static_cast<size_t>(i)); }
  LetterId inverse(LetterId i) const { return inverse_.at(static_cast<size_t>(i)); }

  bool has(const std::string& n) const { return index_.count(n) != 0; }
  LetterId id(const std::string& n) const {
    auto it = index_.find(n);
    if (it == index_.end()) raise("UnknownLetter", "no letter named '" + n + "'");
    return it->second;
  }

  bool operator==(const Alphabet& o) const {
    return names_ == o.names_ && inverse_ == o.inverse_;
  }
  bool operator!=(const Alphabet& o) const { return !(*this == o); }

  std::vector<std::pair<std::string, std::string>> pairs() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (int i = 0; i < size(); ++i) out.emplace_back(names_[i], names_[inverse_[i]]);
    return out;
  }

 private:
  void add_pair(const std::string& n, const std::string& inv) {
    if (index_.count(n)) {
      if (inverse_[index_[n]] != -1) {
        if (names_[inverse_[index_[n]]] != inv)
          raise("MalformedWord", "letter '" + n + "' declared with two inverses");
        return;
      }
    } else {
      index_[n] = size();
      names_.push_back(n);
      inverse_.push_back(-1);
    }
    if (!index_.count(inv)) {
      index_[inv] = size();
      names_.push_back(inv);
      inverse_.push_back(-1);
    }
    LetterId a = index_[n], b = index_[inv];
    inverse_[a] = b;
    inverse_[b] = a;
  }

  void check() const {
    for (int i = 0; i < size(); ++i) {
      if (inverse_[i] < 0 || inverse_[inverse_[i]] != i)
        raise("MalformedWord", "alphabet is not inverse-closed at '" + names_[i] + "'");
    }
  }

  std::vector<std::string> names_;
  std::vector<LetterId> inverse_;
  std::unordered_map<std::string, LetterId> index_;
};

inline Word invert(const Alphabet& a, const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(a.inverse(*it));
  return out;
}

// Deletes adjacent inverse pairs until none remain (stack pass, equivalent to
// repeated leftmost cancellation).
inline Word free_reduce(const Alphabet& a, const Word& w) {
  Word out;
  out.reserve(w.size());
  for (LetterId x : w) {
    if (!out.empty() && a.inverse(out.back()) == x)
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

inline bool is_freely_reduced(const Alphabet& a, const Word& w) {
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if (a.inverse(w[i]) == w[i + 1]) return false;
  return true;
}

// First k letters.
inline Word prefix(const Word& w, size_t k) {
  if (k > w.size()) raise("MalformedWord", "prefix length exceeds word length");
  return Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
}

// Letters from index k to the end.
inline Word suffix_from(const Word& w, size_t k) {
  if (k > w.size()) raise("MalformedWord", "suffix start exceeds word length");
  return Word(w.begin() + static_cast<std::ptrdiff_t>(k), w.end());
}

inline Word cat(const Word& u, const Word& v) {
  Word out = u;
  out.insert(out.end(), v.begin(), v.end());
  return out;
}

inline Word cat(const Word& u, const Word& v, const Word& w) { return cat(cat(u, v), w); }

inline bool shortlex_less(const Word& u, const Word& v) {
  if (u.size() != v.size()) return u.size() < v.size();
  return std::lexicographical_compare(u.begin(), u.end(), v.begin(), v.end());
}

// Whitespace-separated letter names.
inline Word parse_word(const Alphabet& a, const std::string& s) {
  Word w;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) w.push_back(a.id(tok));
  return w;
}

inline std::string format_word(const Alphabet& a, const Word& w) {
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += a.name(w[i]);
  }
  return out;
}

// Copy of `a` with every letter name prefixed; used to keep alphabets of
// composed pieces disjoint.
inline Alphabet tagged(const Alphabet& a, const std::string& prefix) {
  std::vector<std::pair<std::string, std::string>> ps;
  for (int i = 0; i < a.size(); ++i)
    ps.emplace_back(prefix + a.name(i), prefix + a.name(a.inverse(i)));
  return Alphabet::from_pairs(ps);
}

struct MergedAlphabet {
  Alphabet merged;
  // maps[k][i] = id in `merged` of letter i of input alphabet k
  std::vector<std::vector<LetterId>> maps;
};

// Disjoint union of alphabets; duplicate names are an error.
inline MergedAlphabet merge_alphabets(const std::vector<const Alphabet*>& parts) {
  std::vector<std::pair<std::string, std::string>> ps;
  for (const Alphabet* p : parts)
    for (int i = 0; i < p->size(); ++i) ps.emplace_back(p->name(i), p->name(p->inverse(i)));
  size_t expect = 0;
  for (const Alphabet* p : parts) expect += static_cast<size_t>(p->size());
  MergedAlphabet out;
  out.merged = Alphabet::from_pairs(ps);
  if (static_cast<size_t>(out.merged.size()) != expect)
    raise("MalformedWord", "alphabets to merge are not disjoint");
  for (const Alphabet* p : parts) {
    std::vector<LetterId> m(static_cast<size_t>(p->size()));
    for (int i = 0; i < p->size(); ++i) m[static_cast<size_t>(i)] = out.merged.id(p->name(i));
    out.maps.push_back(std::move(m));
  }
  return out;
}

inline Word map_word(const std::vector<LetterId>& letter_map, const Word& w) {
  Word out;
  out.reserve(w.size());
  for (LetterId x : w) out.push_back(letter_map.at(static_cast<size_t>(x)));
  return out;
}

}  // namespace autostack
