#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "autostack/json_io.hpp"
#include "autostack/rewriting.hpp"
#include "autostack/stacking.hpp"

namespace autostack {

// Builds a structure whose normal forms are the irreducible words of a
// convergent prefix-rewriting-compatible system. Local confluence is checked
// via critical pairs; termination is the caller's responsibility (rewrite
// step caps turn nontermination into an error rather than a hang).
inline AutostackableStructure from_rewriting_system(const RewritingSystem& rs_in) {
  RewritingSystem rs = rs_in;
  rs.validate();
  const Alphabet& a = rs.alphabet;
  for (int x = 0; x < a.size(); ++x) {
    Word pair{x, a.inverse(x)};
    if (!rewrite_to_irreducible(rs, pair).empty())
      raise("MalformedSystem",
            "word " + format_word(a, pair) + " must rewrite to the empty word");
  }
  auto bad = unjoinable_critical_pairs(rs);
  if (!bad.empty())
    raise("NotLocallyConfluent",
          "critical pair from " + format_word(a, bad.front().source) + " resolves to " +
              format_word(a, bad.front().left) + " and " + format_word(a, bad.front().right));

  AutostackableStructure s;
  s.alphabet = rs.alphabet;
  s.nf = irreducible_words_fsa(rs);
  int bound = 1;
  for (const Rule& r : rs.rules)
    bound = std::max(bound, static_cast<int>(r.lhs.size()) - 1 + static_cast<int>(r.rhs.size()));
  s.bound = bound;
  s.stacking.kind = StackingMap::Kind::RewritingDerived;
  s.stacking.rules = rs;
  return s;
}

// Marks s as respecting the subgroup generated by the given letters. The
// normal form language must factor as (subgroup normal forms)(transversal):
// nf_h is derived as the subgroup-letter slice of nf and the factorization is
// checked exactly on the automaton level.
inline RespectingStructure split_respecting(const AutostackableStructure& s,
                                            const std::vector<std::string>& subgroup_letter_names,
                                            const Fsa& nf_tr) {
  RespectingStructure r;
  r.base = s;
  std::vector<char> in_b(static_cast<size_t>(s.alphabet.size()), 0);
  for (const std::string& n : subgroup_letter_names) {
    LetterId b = s.alphabet.id(n);
    if (!in_b[static_cast<size_t>(b)]) {
      in_b[static_cast<size_t>(b)] = 1;
      r.subgroup_letters.push_back(b);
    }
    if (!in_b[static_cast<size_t>(s.alphabet.inverse(b))]) {
      in_b[static_cast<size_t>(s.alphabet.inverse(b))] = 1;
      r.subgroup_letters.push_back(s.alphabet.inverse(b));
    }
  }
  std::sort(r.subgroup_letters.begin(), r.subgroup_letters.end());
  r.nf_h = minimize(intersect(s.nf, Fsa::words_over(s.alphabet.size(), r.subgroup_letters)));
  r.nf_tr = minimize(nf_tr);
  if (!accepts(r.nf_tr, Word{}))
    raise("SplitMismatch", "the transversal language must contain the empty word");
  if (!equivalent(s.nf, concat(r.nf_h, r.nf_tr)))
    raise("SplitMismatch",
          "normal forms do not factor as subgroup normal forms times the transversal");
  return r;
}

// Common special case: the transversal is everything and the subgroup trivial.
inline RespectingStructure respecting_trivial(const AutostackableStructure& s) {
  RespectingStructure r;
  r.base = s;
  r.nf_h = Fsa::epsilon_only(s.alphabet.size());
  r.nf_tr = s.nf;
  return r;
}

struct NewGenerator {
  std::string name;
  std::string inverse_name;
  Word value_nf;  // normal form word for the new generator, over the old alphabet
};

namespace detail {

inline AutostackableStructure extend_generators_impl(const AutostackableStructure& s,
                                                     const std::vector<NewGenerator>& gens) {
  if (gens.empty()) return s;
  auto ps = s.alphabet.pairs();
  std::vector<std::pair<std::string, std::string>> all = ps;
  for (const NewGenerator& g : gens) {
    if (g.value_nf.empty())
      raise("MalformedSystem", "new generator '" + g.name + "' must not equal the identity");
    if (!in_normal_forms(s, g.value_nf))
      raise("NotANormalForm",
            "value for new generator '" + g.name + "' is not a normal form word");
    all.emplace_back(g.name, g.inverse_name);
  }
  Alphabet bigger = Alphabet::from_pairs(all);

  std::vector<Word> values(static_cast<size_t>(bigger.size()));
  int bound = s.bound;
  for (const NewGenerator& g : gens) {
    Word z_inv = normal_form(s, invert(s.alphabet, g.value_nf));
    values[static_cast<size_t>(bigger.id(g.name))] = g.value_nf;
    values[static_cast<size_t>(bigger.id(g.inverse_name))] = z_inv;
    bound = std::max(bound, static_cast<int>(g.value_nf.size()));
    bound = std::max(bound, static_cast<int>(z_inv.size()));
  }

  AutostackableStructure out;
  out.alphabet = bigger;
  std::vector<int> embed(static_cast<size_t>(s.alphabet.size()));
  for (int i = 0; i < s.alphabet.size(); ++i) embed[static_cast<size_t>(i)] = i;
  out.nf = remap_symbols(s.nf, bigger.size(), embed);
  out.bound = bound;

  if (s.stacking.kind == StackingMap::Kind::StateTable) {
    // remap_symbols keeps old state numbering and appends one dead state
    out.stacking.kind = StackingMap::Kind::StateTable;
    int n_old = s.alphabet.size(), n_new = bigger.size();
    out.stacking.table.assign(static_cast<size_t>(out.nf.num_states) * n_new, Word{});
    for (int q = 0; q < out.nf.num_states; ++q)
      for (int x = 0; x < n_new; ++x) {
        Word& cell = out.stacking.table[static_cast<size_t>(q) * n_new + x];
        if (x >= n_old)
          cell = values[static_cast<size_t>(x)];
        else if (q < s.nf.num_states)
          cell = s.stacking.table[static_cast<size_t>(q) * n_old + x];
        else
          cell = Word{x};
      }
  } else {
    out.stacking.kind = StackingMap::Kind::Composed;
    out.stacking.combinator = "extend_generators";
    auto inner = std::make_shared<AutostackableStructure>(s);
    int n_old = s.alphabet.size();
    auto vals = std::make_shared<std::vector<Word>>(values);
    out.stacking.eval_fn = [inner, vals, n_old](const Word& y, LetterId x) -> Word {
      if (x >= n_old) return (*vals)[static_cast<size_t>(x)];
      return phi_eval(*inner, y, x);
    };
    out.stacking.image_fn = [inner, vals, n_old, nn = bigger.size()]() {
      auto base = phi_image_superset(*inner);
      if (!base)
        raise("ImageNotEnumerable", "underlying stacking image is not enumerable");
      std::vector<Word> img = *base;
      for (int x = n_old; x < nn; ++x) img.push_back((*vals)[static_cast<size_t>(x)]);
      return img;
    };
    json spec;
    spec["base"] = structure_to_json(s);
    spec["generators"] = json::array();
    for (const NewGenerator& g : gens)
      spec["generators"].push_back({{"name", g.name},
                                    {"inverse", g.inverse_name},
                                    {"value", word_to_json(s.alphabet, g.value_nf)}});
    out.stacking.recipe_json = spec.dump();
  }
  return out;
}

}  // namespace detail

// Adds redundant generators with chosen normal form values. New letters keep
// their single-letter words out of the normal form language; the stacking
// sends each new letter to its value.
inline AutostackableStructure extend_generators(const AutostackableStructure& s,
                                                const std::vector<NewGenerator>& gens) {
  return detail::extend_generators_impl(s, gens);
}

// Extension that keeps track of a respected subgroup on the old letters.
inline RespectingStructure extend_generators(const RespectingStructure& r,
                                             const std::vector<NewGenerator>& gens) {
  RespectingStructure out;
  out.base = detail::extend_generators_impl(r.base, gens);
  out.subgroup_letters = r.subgroup_letters;
  std::vector<int> embed(static_cast<size_t>(r.base.alphabet.size()));
  for (int i = 0; i < r.base.alphabet.size(); ++i) embed[static_cast<size_t>(i)] = i;
  out.nf_h = remap_symbols(r.nf_h, out.base.alphabet.size(), embed);
  out.nf_tr = remap_symbols(r.nf_tr, out.base.alphabet.size(), embed);
  return out;
}

}  // namespace autostack
