#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
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

// Composition along a short exact sequence 1 -> K -> G -> Q -> 1. The kernel
// brings a structure over A_K, the quotient a structure over C respecting
// q(H) for some subgroup H <= G containing K. Each quotient letter c gets a
// fresh lift letter in G, the composed alphabet is A = A_K + lifts, and the
// composed normal forms are Nf_K . lift(Nf_h) . lift(Nf_tr). The result
// respects H, the preimage of q(H).

// States that lift^-1 . letter . lift equals `value` as a kernel word; the
// collector uses it to move kernel letters rightward past lift letters. The
// rule for the inverse kernel letter is derived when not given.
struct ConjugationRule {
  std::string lift;
  std::string letter;
  std::string value;
};

// States that `lhs` (a product of lift letters) equals `rhs` (a word over the
// composed alphabet). Orient these so that repeated application, interleaved
// with collection, shortens words that represent kernel elements.
struct CollapseRule {
  std::string lhs;
  std::string rhs;
};

struct ExtensionSpec {
  AutostackableStructure kernel;
  RespectingStructure quotient;
  // quotient letter name -> fresh lift letter name, one entry per letter;
  // the lifts of a letter and of its inverse become inverse letters.
  std::vector<std::pair<std::string, std::string>> lifts;
  std::vector<ConjugationRule> conj_rules;
  std::vector<CollapseRule> collapse_rules;
  long long collect_step_limit = 100000;
  // Optional replacement for the built-in collector: given a word over the
  // composed alphabet that represents a kernel element, return its kernel
  // normal form. Must be deterministic; outputs are checked against the
  // kernel's normal-form language.
  std::function<Word(const Word&)> k_rewriter;
};

namespace detail {

struct ExtContext {
  AutostackableStructure kernel;
  RespectingStructure quotient;
  Alphabet alpha;                 // kernel letters first, then lift letters
  int nk = 0;                     // ids below nk are kernel letters
  std::vector<LetterId> lift_of;  // quotient letter id -> composed id
  std::vector<LetterId> q_of;     // composed id -> quotient letter id or -1
  // conj[g][k]: kernel word equal to g^-1 k g, for lift g and kernel letter k
  std::vector<std::vector<std::optional<Word>>> conj;
  std::vector<std::pair<Word, Word>> collapse;
  long long step_limit = 0;
  std::function<Word(const Word&)> custom;
};

// Rightward collection: free-reduce, push kernel letters past lift letters
// with the conjugation data, and collapse lift-only patterns until the word
// is spelled entirely in kernel letters.
inline Word ext_collect(const ExtContext& c, Word w) {
  const Word input = w;
  long long steps = 0;
  for (;;) {
    if (++steps > c.step_limit)
      raise("KRewriterFailure", "collection exceeded " + std::to_string(c.step_limit) +
                                    " steps on '" + format_word(c.alpha, input) + "'");
    w = free_reduce(c.alpha, w);
    bool acted = false;
    for (size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i] >= c.nk || w[i + 1] < c.nk) continue;
      const auto& value = c.conj[static_cast<size_t>(w[i + 1])][static_cast<size_t>(w[i])];
      if (!value)
        raise("KRewriterFailure", "no conjugation rule moving '" + c.alpha.name(w[i]) +
                                      "' past '" + c.alpha.name(w[i + 1]) + "'");
      Word next(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i));
      next.push_back(w[i + 1]);
      next.insert(next.end(), value->begin(), value->end());
      next.insert(next.end(), w.begin() + static_cast<std::ptrdiff_t>(i) + 2, w.end());
      w = std::move(next);
      acted = true;
      break;
    }
    if (acted) continue;
    // no kernel letter precedes a lift letter, so w = (lifts)(kernel letters)
    for (size_t at = 0; at < w.size() && !acted; ++at) {
      for (const auto& [lhs, rhs] : c.collapse) {
        if (at + lhs.size() > w.size() ||
            !std::equal(lhs.begin(), lhs.end(), w.begin() + static_cast<std::ptrdiff_t>(at)))
          continue;
        Word next(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(at));
        next.insert(next.end(), rhs.begin(), rhs.end());
        next.insert(next.end(), w.begin() + static_cast<std::ptrdiff_t>(at + lhs.size()), w.end());
        w = std::move(next);
        acted = true;
        break;
      }
    }
    if (acted) continue;
    for (LetterId x : w)
      if (x >= c.nk)
        raise("KRewriterFailure", "word '" + format_word(c.alpha, input) +
                                      "' does not collect into the kernel; stuck at '" +
                                      format_word(c.alpha, w) + "'");
    return w;
  }
}

// Kernel normal form of a word over the composed alphabet that represents a
// kernel element, via the custom rewriter when one is installed.
inline Word ext_k_normal(const ExtContext& c, const Word& w) {
  if (c.custom) {
    Word k = c.custom(w);
    for (LetterId x : k)
      if (x < 0 || x >= c.nk)
        raise("KRewriterFailure", "rewriter returned a letter outside the kernel alphabet");
    if (!accepts(c.kernel.nf, k))
      raise("KRewriterFailure", "rewriter output '" + format_word(c.alpha, k) +
                                    "' is not a kernel normal form");
    return k;
  }
  return normal_form(c.kernel, ext_collect(c, w));
}

// The composed stacking. With y = r . w (kernel part, lift part): a kernel
// letter behind an empty lift part follows the kernel flow; a kernel letter
// behind a nonempty lift part conjugates past the last lift letter l, giving
// l^-1 . nf_K(l a l^-1) . l; a lift letter follows the lifted quotient flow
// u = phi_Q(q(w), q(a)), landing at nf_K(a lift(u)^-1) . lift(u).
inline Word ext_phi(const ExtContext& c, const Word& y, LetterId a) {
  size_t split = 0;
  while (split < y.size() && y[split] < c.nk) ++split;
  for (size_t i = split; i < y.size(); ++i)
    if (y[i] < c.nk)
      raise("NotANormalForm",
            "kernel letter after a lift letter in '" + format_word(c.alpha, y) + "'");
  if (a < c.nk) {
    if (split == y.size()) return phi_eval(c.kernel, y, a);
    LetterId l = y.back();
    Word r = ext_k_normal(c, Word{l, a, c.alpha.inverse(l)});
    Word out{c.alpha.inverse(l)};
    out.insert(out.end(), r.begin(), r.end());
    out.push_back(l);
    return out;
  }
  Word qw;
  for (size_t i = split; i < y.size(); ++i)
    qw.push_back(c.q_of[static_cast<size_t>(y[i])]);
  Word u = phi_eval(c.quotient.base, qw, c.q_of[static_cast<size_t>(a)]);
  Word lifted;
  for (LetterId x : u) lifted.push_back(c.lift_of[static_cast<size_t>(x)]);
  Word r = ext_k_normal(c, cat(Word{a}, invert(c.alpha, lifted)));
  return cat(r, lifted);
}

inline std::shared_ptr<const ExtContext> build_ext_context(const ExtensionSpec& spec) {
  auto c = std::make_shared<ExtContext>();
  c->kernel = spec.kernel;
  c->quotient = spec.quotient;
  c->custom = spec.k_rewriter;
  if (spec.collect_step_limit <= 0)
    raise("SpecInvariantViolation", "collection step limit must be positive");
  c->step_limit = spec.collect_step_limit;

  const Alphabet& ka = spec.kernel.alphabet;
  const Alphabet& qa = spec.quotient.base.alphabet;
  c->nk = ka.size();
  int nq = qa.size();

  std::vector<std::string> lift_name(static_cast<size_t>(nq));
  {
    std::vector<char> seen(static_cast<size_t>(nq), 0);
    for (const auto& [qname, gname] : spec.lifts) {
      if (!qa.has(qname))
        raise("SpecInvariantViolation", "lift entry names unknown quotient letter '" + qname + "'");
      int qi = qa.id(qname);
      if (seen[static_cast<size_t>(qi)])
        raise("SpecInvariantViolation", "two lifts for quotient letter '" + qname + "'");
      seen[static_cast<size_t>(qi)] = 1;
      lift_name[static_cast<size_t>(qi)] = gname;
    }
    std::set<std::string> uniq;
    for (int qi = 0; qi < nq; ++qi) {
      if (!seen[static_cast<size_t>(qi)])
        raise("SpecInvariantViolation", "no lift given for quotient letter '" + qa.name(qi) + "'");
      const std::string& g = lift_name[static_cast<size_t>(qi)];
      if (ka.has(g))
        raise("SpecInvariantViolation", "lift letter '" + g + "' collides with a kernel letter");
      if (!uniq.insert(g).second)
        raise("SpecInvariantViolation", "lift letter '" + g + "' used twice");
    }
  }

  std::vector<std::pair<std::string, std::string>> pairs = ka.pairs();
  for (int qi = 0; qi < nq; ++qi)
    pairs.emplace_back(lift_name[static_cast<size_t>(qi)],
                       lift_name[static_cast<size_t>(qa.inverse(qi))]);
  c->alpha = Alphabet::from_pairs(pairs);
  int n = c->alpha.size();
  if (n != c->nk + nq)
    raise("SpecInvariantViolation", "lift letters do not form fresh inverse pairs");
  for (int i = 0; i < c->nk; ++i)
    if (c->alpha.name(i) != ka.name(i) || c->alpha.inverse(i) != ka.inverse(i))
      raise("SpecInvariantViolation",
            "kernel alphabet must list each letter adjacent to its inverse");

  c->lift_of.assign(static_cast<size_t>(nq), -1);
  c->q_of.assign(static_cast<size_t>(n), -1);
  for (int qi = 0; qi < nq; ++qi) {
    LetterId g = c->alpha.id(lift_name[static_cast<size_t>(qi)]);
    c->lift_of[static_cast<size_t>(qi)] = g;
    c->q_of[static_cast<size_t>(g)] = qi;
  }

  if (!accepts(spec.kernel.nf, Word{}) || !is_prefix_closed(spec.kernel.nf))
    raise("SpecInvariantViolation", "kernel normal forms must contain the empty word and be prefix closed");
  if (!accepts(spec.quotient.nf_h, Word{}) || !is_prefix_closed(spec.quotient.nf_h))
    raise("SpecInvariantViolation",
          "quotient subgroup normal forms must contain the empty word and be prefix closed");
  if (!accepts(spec.quotient.nf_tr, Word{}) || !is_prefix_closed(spec.quotient.nf_tr))
    raise("SpecInvariantViolation",
          "quotient transversal normal forms must contain the empty word and be prefix closed");

  c->conj.assign(static_cast<size_t>(n),
                 std::vector<std::optional<Word>>(static_cast<size_t>(c->nk)));
  for (const ConjugationRule& r : spec.conj_rules) {
    if (!c->alpha.has(r.lift) || c->alpha.id(r.lift) < c->nk)
      raise("SpecInvariantViolation", "conjugation rule names non-lift letter '" + r.lift + "'");
    if (!ka.has(r.letter))
      raise("SpecInvariantViolation", "conjugation rule names non-kernel letter '" + r.letter + "'");
    auto& slot =
        c->conj[static_cast<size_t>(c->alpha.id(r.lift))][static_cast<size_t>(ka.id(r.letter))];
    if (slot)
      raise("SpecInvariantViolation",
            "duplicate conjugation rule for ('" + r.lift + "', '" + r.letter + "')");
    slot = parse_word(ka, r.value);
  }
  for (int g = c->nk; g < n; ++g)
    for (int k = 0; k < c->nk; ++k) {
      int ki = ka.inverse(k);
      auto& given = c->conj[static_cast<size_t>(g)][static_cast<size_t>(k)];
      auto& mirror = c->conj[static_cast<size_t>(g)][static_cast<size_t>(ki)];
      if (given && !mirror) mirror = invert(ka, *given);
    }

  for (const CollapseRule& r : spec.collapse_rules) {
    Word lhs = parse_word(c->alpha, r.lhs);
    Word rhs = parse_word(c->alpha, r.rhs);
    if (lhs.empty()) raise("SpecInvariantViolation", "collapse rule with empty left side");
    for (LetterId x : lhs)
      if (x < c->nk)
        raise("SpecInvariantViolation", "collapse rule left side must use lift letters only");
    c->collapse.emplace_back(std::move(lhs), std::move(rhs));
  }
  return c;
}

}  // namespace detail

inline json extension_spec_to_json(const ExtensionSpec& spec) {
  json j;
  j["kernel"] = structure_to_json(spec.kernel);
  j["quotient"] = respecting_to_json(spec.quotient);
  j["lifts"] = json::array();
  for (const auto& [qname, gname] : spec.lifts)
    j["lifts"].push_back({{"q", qname}, {"lift", gname}});
  j["conj_rules"] = json::array();
  for (const ConjugationRule& r : spec.conj_rules)
    j["conj_rules"].push_back({{"lift", r.lift}, {"letter", r.letter}, {"value", r.value}});
  j["collapse_rules"] = json::array();
  for (const CollapseRule& r : spec.collapse_rules)
    j["collapse_rules"].push_back({{"lhs", r.lhs}, {"rhs", r.rhs}});
  j["step_limit"] = spec.collect_step_limit;
  if (spec.k_rewriter) j["k_rewriter"] = "custom";
  return j;
}

inline ExtensionSpec extension_spec_from_json(const json& j,
                                              const StructureLoader& load = structure_from_json_leaf) {
  if (j.contains("k_rewriter"))
    raise("MalformedSystem", "a custom kernel rewriter cannot be reconstructed from JSON");
  ExtensionSpec spec;
  spec.kernel = load(j.at("kernel"));
  spec.quotient = respecting_from_json(j.at("quotient"), load);
  for (const auto& e : j.at("lifts"))
    spec.lifts.emplace_back(e.at("q").get<std::string>(), e.at("lift").get<std::string>());
  for (const auto& e : j.at("conj_rules"))
    spec.conj_rules.push_back({e.at("lift").get<std::string>(), e.at("letter").get<std::string>(),
                               e.at("value").get<std::string>()});
  for (const auto& e : j.at("collapse_rules"))
    spec.collapse_rules.push_back({e.at("lhs").get<std::string>(), e.at("rhs").get<std::string>()});
  if (j.contains("step_limit")) spec.collect_step_limit = j["step_limit"].get<long long>();
  return spec;
}

inline RespectingStructure extension_compose(const ExtensionSpec& spec) {
  auto ctx = detail::build_ext_context(spec);
  int n = ctx->alpha.size(), nk = ctx->nk;
  const Alphabet& qa = spec.quotient.base.alphabet;
  int nq = qa.size();

  std::vector<int> embed_k(static_cast<size_t>(nk));
  for (int i = 0; i < nk; ++i) embed_k[static_cast<size_t>(i)] = i;
  std::vector<int> embed_q(static_cast<size_t>(nq));
  for (int qi = 0; qi < nq; ++qi)
    embed_q[static_cast<size_t>(qi)] = ctx->lift_of[static_cast<size_t>(qi)];

  Fsa k_nf = remap_symbols(spec.kernel.nf, n, embed_k);
  Fsa h_nf = remap_symbols(spec.quotient.nf_h, n, embed_q);
  Fsa t_nf = remap_symbols(spec.quotient.nf_tr, n, embed_q);
  Fsa nf = minimize(concat(k_nf, concat(h_nf, t_nf)));
  if (!is_prefix_closed(nf))
    raise("SpecInvariantViolation", "composed normal forms are not prefix closed");

  // erasing kernel letters and undoing the lifts must carry the composed
  // normal forms exactly onto the quotient normal forms
  {
    std::vector<Word> im(static_cast<size_t>(n));
    for (int i = nk; i < n; ++i)
      im[static_cast<size_t>(i)] = Word{ctx->q_of[static_cast<size_t>(i)]};
    if (!equivalent(hom_image(nf, nq, im), spec.quotient.base.nf))
      raise("SpecInvariantViolation",
            "quotient image of the composed normal forms differs from the quotient normal forms");
  }

  auto qimg = phi_image_superset(spec.quotient.base);
  if (!qimg)
    raise("SpecInvariantViolation",
          "quotient stacking image is not enumerable; cannot bound the composed flow");

  // bound sweep over both conjugation-shaped values; pairs the rewriter
  // cannot collect are unreachable for the flow and raise there instead
  int bound = spec.kernel.bound;
  std::set<Word> values;
  auto consider = [&](const Word& v) {
    bound = std::max(bound, static_cast<int>(v.size()));
    values.insert(v);
  };
  for (int g = nk; g < n; ++g) {
    for (int k = 0; k < nk; ++k) {
      try {
        Word r = detail::ext_k_normal(*ctx, Word{g, k, ctx->alpha.inverse(g)});
        Word v{ctx->alpha.inverse(g)};
        v.insert(v.end(), r.begin(), r.end());
        v.push_back(g);
        consider(v);
      } catch (const Error& e) {
        if (e.code != "KRewriterFailure") throw;
      }
    }
    for (const Word& u : *qimg) {
      Word lifted;
      for (LetterId x : u) lifted.push_back(ctx->lift_of[static_cast<size_t>(x)]);
      try {
        Word r = detail::ext_k_normal(*ctx, cat(Word{g}, invert(ctx->alpha, lifted)));
        consider(cat(r, lifted));
      } catch (const Error& e) {
        if (e.code != "KRewriterFailure") throw;
      }
    }
  }

  RespectingStructure out;
  out.base.alphabet = ctx->alpha;
  out.base.nf = nf;
  out.base.bound = bound;
  out.base.stacking.kind = StackingMap::Kind::Composed;
  out.base.stacking.combinator = "extension";
  out.base.stacking.eval_fn = [ctx](const Word& y, LetterId a) {
    return detail::ext_phi(*ctx, y, a);
  };
  if (auto kimg = phi_image_superset(spec.kernel)) {
    std::set<Word> img = values;
    for (int a = 0; a < n; ++a) img.insert(Word{a});
    for (const Word& w : *kimg) img.insert(w);
    std::vector<Word> all(img.begin(), img.end());
    out.base.stacking.image_fn = [all]() { return all; };
  }
  out.base.stacking.recipe_json = extension_spec_to_json(spec).dump();

  for (int i = 0; i < nk; ++i) out.subgroup_letters.push_back(i);
  for (LetterId d : spec.quotient.subgroup_letters)
    out.subgroup_letters.push_back(ctx->lift_of[static_cast<size_t>(d)]);
  std::sort(out.subgroup_letters.begin(), out.subgroup_letters.end());
  out.nf_h = minimize(concat(k_nf, h_nf));
  out.nf_tr = minimize(t_nf);
  return out;
}

}  // namespace autostack
