#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "autostack/errors.hpp"
#include "autostack/fsa.hpp"
#include "autostack/json_io.hpp"
#include "autostack/stacking.hpp"
#include "autostack/words.hpp"

namespace autostack {

// Composition up a finite-index inclusion H <= G. The subgroup brings a
// structure over B, the full alphabet A extends B, and a finite prefix-closed
// transversal t_0 = empty, t_1, ... enumerates the right cosets H t_i. The
// action table records t_i . a = h . t_j with h a word over B; the composed
// normal forms are Nf_H . {transversal words} and the result respects H.

// One cell of the coset action: from the coset of transversal word `coset`,
// reading `letter` lands in the coset of `target` after emitting the
// subgroup word `value` on the left.
struct CosetActionEntry {
  int coset = 0;
  std::string letter;
  std::string value;
  int target = 0;
};

struct FiniteIndexSpec {
  AutostackableStructure subgroup;
  // the full alphabet; the subgroup letters must come first with unchanged ids
  Alphabet full_alphabet;
  // words over the full alphabet, first entry empty, prefix-closed as a set
  std::vector<std::string> transversal;
  // complete table: one entry per (transversal index, letter)
  std::vector<CosetActionEntry> action;
};

namespace detail {

struct FindexContext {
  AutostackableStructure sub;
  Alphabet alpha;
  int nb = 0;           // ids below nb are subgroup letters
  Fsa nf;               // composed normal forms
  Fsa h_nf;             // subgroup normal forms over the full alphabet
  Fsa tr_nf;            // the transversal words as a language
  std::vector<Word> tr;
  std::vector<size_t> by_length;  // transversal indices, longest first
  // hword[i][a]: the H-normalized u with t_i . a = u . t_target, over B ids
  std::vector<std::vector<Word>> hword;
  std::vector<std::vector<int>> target;
};

// Factor y in Nf_G as x . t_i: scan transversal words longest first and take
// the first suffix whose complementary prefix is a subgroup normal form.
inline std::pair<int, size_t> findex_split(const FindexContext& c, const Word& y) {
  for (size_t idx : c.by_length) {
    const Word& t = c.tr[idx];
    if (t.size() > y.size()) continue;
    size_t pos = y.size() - t.size();
    if (!std::equal(t.begin(), t.end(), y.begin() + static_cast<std::ptrdiff_t>(pos))) continue;
    Word x(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(pos));
    if (accepts(c.h_nf, x)) return {static_cast<int>(idx), pos};
  }
  raise("NotANormalForm",
        "'" + format_word(c.alpha, y) + "' does not factor as subgroup part times transversal");
}

// The composed stacking on y = x . t_i: a subgroup letter behind the empty
// transversal word follows the subgroup flow; a tree edge maps to itself;
// otherwise unwind t_i, emit the recorded subgroup word, and rebuild t_j.
inline Word findex_phi(const FindexContext& c, const Word& y, LetterId a) {
  auto [i, pos] = findex_split(c, y);
  (void)pos;
  if (i == 0 && a < c.nb) return phi_eval(c.sub, y, a);
  if ((!y.empty() && y.back() == c.alpha.inverse(a)) || accepts(c.nf, cat(y, Word{a})))
    return Word{a};
  Word out = invert(c.alpha, c.tr[static_cast<size_t>(i)]);
  const Word& u = c.hword[static_cast<size_t>(i)][static_cast<size_t>(a)];
  out.insert(out.end(), u.begin(), u.end());
  const Word& t = c.tr[static_cast<size_t>(c.target[static_cast<size_t>(i)][static_cast<size_t>(a)])];
  out.insert(out.end(), t.begin(), t.end());
  return out;
}

inline std::shared_ptr<const FindexContext> build_findex_context(const FiniteIndexSpec& spec) {
  auto c = std::make_shared<FindexContext>();
  c->sub = spec.subgroup;
  c->alpha = spec.full_alphabet;
  const Alphabet& ba = spec.subgroup.alphabet;
  c->nb = ba.size();
  int n = c->alpha.size();
  if (n < c->nb)
    raise("SpecInvariantViolation", "full alphabet is smaller than the subgroup alphabet");
  for (int i = 0; i < c->nb; ++i)
    if (c->alpha.name(i) != ba.name(i) || c->alpha.inverse(i) != ba.inverse(i))
      raise("SpecInvariantViolation",
            "subgroup alphabet must be an id prefix of the full alphabet");
  if (!accepts(spec.subgroup.nf, Word{}) || !is_prefix_closed(spec.subgroup.nf))
    raise("SpecInvariantViolation",
          "subgroup normal forms must contain the empty word and be prefix closed");

  if (spec.transversal.empty())
    raise("SpecInvariantViolation", "at least one transversal word is required");
  std::map<Word, int> index_of;
  for (const std::string& s : spec.transversal) {
    Word t = parse_word(c->alpha, s);
    if (!index_of.emplace(t, static_cast<int>(c->tr.size())).second)
      raise("SpecInvariantViolation", "transversal words must be distinct");
    c->tr.push_back(std::move(t));
  }
  if (!c->tr[0].empty())
    raise("SpecInvariantViolation", "the first transversal word must be the empty word");
  int nt = static_cast<int>(c->tr.size());
  for (const Word& t : c->tr) {
    if (t.empty()) continue;
    Word parent(t.begin(), t.end() - 1);
    if (!index_of.count(parent))
      raise("NonPrefixClosedTransversal", "transversal word '" + format_word(c->alpha, t) +
                                              "' lacks its prefix '" +
                                              format_word(c->alpha, parent) + "'");
  }
  for (size_t idx = 0; idx < c->tr.size(); ++idx) c->by_length.push_back(idx);
  std::stable_sort(c->by_length.begin(), c->by_length.end(),
                   [&](size_t l, size_t r) { return c->tr[l].size() > c->tr[r].size(); });

  c->hword.assign(static_cast<size_t>(nt), std::vector<Word>(static_cast<size_t>(n)));
  c->target.assign(static_cast<size_t>(nt), std::vector<int>(static_cast<size_t>(n), -1));
  for (const CosetActionEntry& e : spec.action) {
    if (e.coset < 0 || e.coset >= nt || e.target < 0 || e.target >= nt)
      raise("SpecInvariantViolation", "coset index out of range in action entry");
    if (!c->alpha.has(e.letter))
      raise("SpecInvariantViolation", "action entry names unknown letter '" + e.letter + "'");
    LetterId a = c->alpha.id(e.letter);
    if (c->target[static_cast<size_t>(e.coset)][static_cast<size_t>(a)] >= 0)
      raise("SpecInvariantViolation", "duplicate action entry for transversal word '" +
                                          format_word(c->alpha, c->tr[static_cast<size_t>(e.coset)]) +
                                          "' and letter '" + e.letter + "'");
    c->hword[static_cast<size_t>(e.coset)][static_cast<size_t>(a)] =
        normal_form(spec.subgroup, parse_word(ba, e.value));
    c->target[static_cast<size_t>(e.coset)][static_cast<size_t>(a)] = e.target;
  }
  for (int i = 0; i < nt; ++i)
    for (int a = 0; a < n; ++a)
      if (c->target[static_cast<size_t>(i)][static_cast<size_t>(a)] < 0)
        raise("InconsistentCosetTable",
              "no action entry for transversal word '" +
                  format_word(c->alpha, c->tr[static_cast<size_t>(i)]) + "' and letter '" +
                  c->alpha.name(a) + "'");

  // internal coherence: reading a letter and then its inverse must return to
  // the same coset with the inverse subgroup word, subgroup letters must fix
  // the trivial coset, and each transversal word must be reached from its
  // longest proper prefix with no subgroup contribution
  for (int i = 0; i < nt; ++i)
    for (int a = 0; a < n; ++a) {
      int j = c->target[static_cast<size_t>(i)][static_cast<size_t>(a)];
      LetterId ai = c->alpha.inverse(a);
      if (c->target[static_cast<size_t>(j)][static_cast<size_t>(ai)] != i)
        raise("InconsistentCosetTable",
              "letter '" + c->alpha.name(a) + "' maps coset " + std::to_string(i) + " to " +
                  std::to_string(j) + " but '" + c->alpha.name(ai) + "' does not map it back");
      Word back = normal_form(
          spec.subgroup, invert(ba, c->hword[static_cast<size_t>(i)][static_cast<size_t>(a)]));
      if (c->hword[static_cast<size_t>(j)][static_cast<size_t>(ai)] != back)
        raise("InconsistentCosetTable", "action entries for '" + c->alpha.name(a) + "' and '" +
                                            c->alpha.name(ai) + "' at coset " + std::to_string(i) +
                                            " are not inverse to each other");
    }
  for (int a = 0; a < c->nb; ++a)
    if (c->target[0][static_cast<size_t>(a)] != 0 ||
        c->hword[0][static_cast<size_t>(a)] != normal_form(spec.subgroup, Word{a}))
      raise("InconsistentCosetTable",
            "subgroup letter '" + c->alpha.name(a) + "' must fix the trivial coset as itself");
  for (int m = 0; m < nt; ++m) {
    if (c->tr[static_cast<size_t>(m)].empty()) continue;
    Word parent(c->tr[static_cast<size_t>(m)].begin(), c->tr[static_cast<size_t>(m)].end() - 1);
    int k = index_of.at(parent);
    LetterId a = c->tr[static_cast<size_t>(m)].back();
    if (c->target[static_cast<size_t>(k)][static_cast<size_t>(a)] != m ||
        !c->hword[static_cast<size_t>(k)][static_cast<size_t>(a)].empty())
      raise("InconsistentCosetTable",
            "transversal word '" + format_word(c->alpha, c->tr[static_cast<size_t>(m)]) +
                "' is not reached from its prefix by the action table");
  }

  std::vector<int> embed(static_cast<size_t>(c->nb));
  for (int i = 0; i < c->nb; ++i) embed[static_cast<size_t>(i)] = i;
  c->h_nf = remap_symbols(spec.subgroup.nf, n, embed);
  std::vector<Fsa> parts;
  for (const Word& t : c->tr) parts.push_back(Fsa::single_word(n, t));
  c->tr_nf = minimize(unite_many(parts));
  c->nf = minimize(concat(c->h_nf, c->tr_nf));
  if (!is_prefix_closed(c->nf))
    raise("SpecInvariantViolation", "composed normal forms are not prefix closed");
  return c;
}

}  // namespace detail

inline json findex_spec_to_json(const FiniteIndexSpec& spec) {
  json j;
  j["subgroup"] = structure_to_json(spec.subgroup);
  j["alphabet"] = alphabet_to_json(spec.full_alphabet);
  j["transversal"] = spec.transversal;
  j["action"] = json::array();
  for (const CosetActionEntry& e : spec.action)
    j["action"].push_back(
        {{"coset", e.coset}, {"letter", e.letter}, {"value", e.value}, {"target", e.target}});
  return j;
}

inline FiniteIndexSpec findex_spec_from_json(const json& j,
                                             const StructureLoader& load = structure_from_json_leaf) {
  FiniteIndexSpec spec;
  spec.subgroup = load(j.at("subgroup"));
  spec.full_alphabet = alphabet_from_json(j.at("alphabet"));
  for (const auto& t : j.at("transversal")) spec.transversal.push_back(t.get<std::string>());
  for (const auto& e : j.at("action"))
    spec.action.push_back({e.at("coset").get<int>(), e.at("letter").get<std::string>(),
                           e.at("value").get<std::string>(), e.at("target").get<int>()});
  return spec;
}

inline RespectingStructure finite_index_compose(const FiniteIndexSpec& spec) {
  auto ctx = detail::build_findex_context(spec);
  int n = ctx->alpha.size(), nb = ctx->nb;
  int nt = static_cast<int>(ctx->tr.size());

  // every unwind-emit-rebuild value is already determined by the table, so
  // the bound is a finite maximum; pairs the first two cases capture are
  // skipped because the flow never emits their table value
  int bound = std::max(spec.subgroup.bound, 1);
  std::set<Word> values;
  for (int i = 0; i < nt; ++i)
    for (int a = 0; a < n; ++a) {
      if (i == 0 && a < nb) continue;
      Word v = invert(ctx->alpha, ctx->tr[static_cast<size_t>(i)]);
      const Word& u = ctx->hword[static_cast<size_t>(i)][static_cast<size_t>(a)];
      v.insert(v.end(), u.begin(), u.end());
      const Word& t =
          ctx->tr[static_cast<size_t>(ctx->target[static_cast<size_t>(i)][static_cast<size_t>(a)])];
      v.insert(v.end(), t.begin(), t.end());
      bound = std::max(bound, static_cast<int>(v.size()));
      values.insert(std::move(v));
    }

  RespectingStructure out;
  out.base.alphabet = ctx->alpha;
  out.base.nf = ctx->nf;
  out.base.bound = bound;
  out.base.stacking.kind = StackingMap::Kind::Composed;
  out.base.stacking.combinator = "finite_index";
  out.base.stacking.eval_fn = [ctx](const Word& y, LetterId a) {
    return detail::findex_phi(*ctx, y, a);
  };
  if (auto simg = phi_image_superset(spec.subgroup)) {
    std::set<Word> img = values;
    for (int a = 0; a < n; ++a) img.insert(Word{a});
    for (const Word& w : *simg) img.insert(w);
    std::vector<Word> all(img.begin(), img.end());
    out.base.stacking.image_fn = [all]() { return all; };
  }
  out.base.stacking.recipe_json = findex_spec_to_json(spec).dump();

  for (int i = 0; i < nb; ++i) out.subgroup_letters.push_back(i);
  out.nf_h = minimize(ctx->h_nf);
  out.nf_tr = ctx->tr_nf;
  return out;
}

}  // namespace autostack
