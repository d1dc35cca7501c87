#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "autostack/errors.hpp"
#include "autostack/fsa.hpp"
#include "autostack/padded.hpp"
#include "autostack/rewriting.hpp"
#include "autostack/words.hpp"

namespace autostack {

// Bounded stacking function phi: (normal form y, letter a) -> word of length
// at most the structure's bound, labelling the flow of the Cayley-graph edge
// e_{y,a}. Spanning-tree edges map to their own label.
struct StackingMap {
  enum class Kind { StateTable, RewritingDerived, Composed };
  Kind kind = Kind::StateTable;

  // StateTable: value per (normal-form acceptor state, letter), including the
  // tree-edge entries (which hold the letter itself).
  std::vector<Word> table;

  // RewritingDerived: values computed on demand from the rules.
  std::optional<RewritingSystem> rules;

  // Composed: closure-construction evaluator capturing its ingredients.
  std::string combinator;
  std::function<Word(const Word&, LetterId)> eval_fn;
  // Finite superset of the image of phi, when one is enumerable.
  std::function<std::vector<Word>()> image_fn;
  // Construction recipe as a JSON string; empty for leaf kinds.
  std::string recipe_json;
};

struct AutostackableStructure {
  Alphabet alphabet;
  Fsa nf;     // normal-form acceptor, complete and deterministic
  int bound = 0;
  StackingMap stacking;
  std::optional<Fsa> graph_phi;  // compiled acceptor of {conv(y, a, phi(y,a))}

  TupleAlphabet graph_alphabet() const {
    int n = alphabet.size();
    return TupleAlphabet({n, n, n});
  }
};

// An autostackable structure whose normal forms factor as Nf_H . Nf_Tr over a
// distinguished inverse-closed subgroup alphabet B.
struct RespectingStructure {
  AutostackableStructure base;
  std::vector<LetterId> subgroup_letters;  // B, ids into base.alphabet
  Fsa nf_h;   // subgroup normal forms (over the full alphabet, letters from B)
  Fsa nf_tr;  // transversal normal forms
};

inline bool in_normal_forms(const AutostackableStructure& s, const Word& y) {
  return accepts(s.nf, y);
}

// Tree-edge test for y in Nf: the edge e_{y,a} lies in the spanning tree iff
// ya is again a normal form or y ends with the inverse letter of a.
inline bool in_tree(const AutostackableStructure& s, const Word& y, LetterId a) {
  if (!y.empty() && s.alphabet.inverse(y.back()) == a) return true;
  return accepts(s.nf, cat(y, Word{a}));
}

inline Word phi_eval(const AutostackableStructure& s, const Word& y, LetterId a) {
  if (a < 0 || a >= s.alphabet.size()) raise("UnknownLetter", "letter id out of range");
  int q = walk(s.nf, y);
  if (!s.nf.accepting[static_cast<size_t>(q)])
    raise("NotANormalForm", "phi is only defined on accepted normal forms; got '" +
                                format_word(s.alphabet, y) + "'");
  switch (s.stacking.kind) {
    case StackingMap::Kind::StateTable:
      return s.stacking.table.at(static_cast<size_t>(q) * s.alphabet.size() + static_cast<size_t>(a));
    case StackingMap::Kind::RewritingDerived: {
      if (in_tree(s, y, a)) return Word{a};
      return suffix_rule_value(*s.stacking.rules, y, a);
    }
    case StackingMap::Kind::Composed: {
      Word out = s.stacking.eval_fn(y, a);
      if (static_cast<int>(out.size()) > s.bound)
        raise("BoundViolation", "composed stacking produced a word of length " +
                                    std::to_string(out.size()) + " > bound " +
                                    std::to_string(s.bound));
      return out;
    }
  }
  raise("MalformedAutomaton", "unreachable stacking kind");
}

// Finite superset of im(phi) when the representation allows enumerating one.
inline std::optional<std::vector<Word>> phi_image_superset(const AutostackableStructure& s) {
  std::set<Word> acc;
  for (int a = 0; a < s.alphabet.size(); ++a) acc.insert(Word{a});
  switch (s.stacking.kind) {
    case StackingMap::Kind::StateTable:
      for (const Word& w : s.stacking.table) acc.insert(w);
      break;
    case StackingMap::Kind::RewritingDerived:
      for (const Rule& r : s.stacking.rules->rules)
        acc.insert(cat(invert(s.stacking.rules->alphabet, prefix(r.lhs, r.lhs.size() - 1)), r.rhs));
      break;
    case StackingMap::Kind::Composed: {
      if (!s.stacking.image_fn) return std::nullopt;
      for (const Word& w : s.stacking.image_fn()) acc.insert(w);
      break;
    }
  }
  std::vector<Word> out(acc.begin(), acc.end());
  std::sort(out.begin(), out.end(), shortlex_less);
  return out;
}

struct SolverOptions {
  std::optional<long long> step_limit;  // overrides env and the default formula
};

inline long long default_step_limit(size_t input_len, int bound) {
  const long long cap = 1000000;
  long double v = 10.0L * static_cast<long double>(input_len + 1);
  for (size_t i = 0; i < input_len; ++i) {
    v *= static_cast<long double>(std::max(bound, 1));
    if (v >= static_cast<long double>(cap)) return cap;
  }
  return static_cast<long long>(v);
}

inline long long resolve_step_limit(const SolverOptions& opts, size_t input_len, int bound) {
  if (opts.step_limit) return *opts.step_limit;
  if (const char* env = std::getenv("AUTOSTACK_STEP_LIMIT")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return default_step_limit(input_len, bound);
}

struct RewriteEvent {
  enum class Kind { Flow, Cancel };
  Kind kind = Kind::Cancel;
  size_t pos = 0;    // Flow: index of letter a (= length of the prefix); Cancel: left index of the pair
  Word nf_prefix;    // Flow only: the normal-form prefix y
  LetterId letter = 0;  // Flow: a; Cancel: the left letter of the cancelled pair
  Word replacement;  // Flow only: phi(y, a)
};

struct DerivationTrace {
  Word input;
  Word result;
  std::vector<RewriteEvent> events;
};

namespace detail {

// Leftmost-first free reduction, emitting one Cancel event per deleted pair.
inline void reduce_with_events(const Alphabet& alpha, Word& w, std::vector<RewriteEvent>* events) {
  size_t i = 0;
  while (i + 1 < w.size()) {
    if (alpha.inverse(w[i]) == w[i + 1]) {
      if (events) {
        RewriteEvent ev;
        ev.kind = RewriteEvent::Kind::Cancel;
        ev.pos = i;
        ev.letter = w[i];
        events->push_back(ev);
      }
      w.erase(w.begin() + static_cast<std::ptrdiff_t>(i),
              w.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      i = i > 0 ? i - 1 : 0;
    } else {
      ++i;
    }
  }
}

inline Word solve(const AutostackableStructure& s, Word w, const SolverOptions& opts,
                  std::vector<RewriteEvent>* events) {
  for (LetterId x : w)
    if (x < 0 || x >= s.alphabet.size()) raise("UnknownLetter", "word uses letter outside alphabet");
  long long limit = resolve_step_limit(opts, w.size(), s.bound);
  long long steps = 0;
  for (;;) {
    reduce_with_events(s.alphabet, w, events);
    // longest prefix of w accepted by the normal-form acceptor
    size_t best = 0;
    int q = s.nf.start;
    if (!s.nf.accepting[static_cast<size_t>(q)])
      raise("NotANormalForm", "normal-form language must contain the empty word");
    for (size_t i = 0; i < w.size(); ++i) {
      q = s.nf.next(q, w[i]);
      if (s.nf.accepting[static_cast<size_t>(q)]) best = i + 1;
    }
    if (best == w.size()) return w;
    Word y = prefix(w, best);
    LetterId a = w[best];
    if (++steps > limit)
      raise("StepLimitExceeded", "prefix rewriting exceeded " + std::to_string(limit) + " steps");
    if (!y.empty() && s.alphabet.inverse(y.back()) == a) {
      if (events) {
        RewriteEvent ev;
        ev.kind = RewriteEvent::Kind::Cancel;
        ev.pos = best - 1;
        ev.letter = y.back();
        events->push_back(ev);
      }
      w.erase(w.begin() + static_cast<std::ptrdiff_t>(best) - 1,
              w.begin() + static_cast<std::ptrdiff_t>(best) + 1);
      continue;
    }
    Word u = phi_eval(s, y, a);
    if (u.size() == 1 && u[0] == a)
      raise("StuckRewrite", "phi fixes the non-tree edge at '" + format_word(s.alphabet, y) +
                                "' . '" + s.alphabet.name(a) + "'; no progress possible");
    if (events) {
      RewriteEvent ev;
      ev.kind = RewriteEvent::Kind::Flow;
      ev.pos = best;
      ev.nf_prefix = y;
      ev.letter = a;
      ev.replacement = u;
      events->push_back(ev);
    }
    Word rest = suffix_from(w, best + 1);
    w = cat(y, u, rest);
  }
}

}  // namespace detail

inline Word normal_form(const AutostackableStructure& s, const Word& w, const SolverOptions& opts = {}) {
  return detail::solve(s, w, opts, nullptr);
}

inline bool is_trivial(const AutostackableStructure& s, const Word& w, const SolverOptions& opts = {}) {
  return normal_form(s, w, opts).empty();
}

inline DerivationTrace derivation_trace(const AutostackableStructure& s, const Word& w,
                                        const SolverOptions& opts = {}) {
  DerivationTrace t;
  t.input = w;
  t.result = detail::solve(s, w, opts, &t.events);
  return t;
}

// Re-applies the recorded events to the input, checking each against the
// current word; returns the final word.
inline Word replay_trace(const Alphabet& alpha, const DerivationTrace& t) {
  Word w = t.input;
  for (const RewriteEvent& ev : t.events) {
    if (ev.kind == RewriteEvent::Kind::Cancel) {
      if (ev.pos + 1 >= w.size() || w[ev.pos] != ev.letter ||
          alpha.inverse(w[ev.pos]) != w[ev.pos + 1])
        raise("MalformedWord", "cancel event does not match the current word");
      w.erase(w.begin() + static_cast<std::ptrdiff_t>(ev.pos),
              w.begin() + static_cast<std::ptrdiff_t>(ev.pos) + 2);
    } else {
      if (ev.pos > w.size() || prefix(w, ev.pos) != ev.nf_prefix || w[ev.pos] != ev.letter)
        raise("MalformedWord", "flow event does not match the current word");
      Word rest = suffix_from(w, ev.pos + 1);
      w = cat(ev.nf_prefix, ev.replacement, rest);
    }
  }
  if (w != t.result) raise("MalformedWord", "trace replay does not reproduce the result");
  return w;
}

// Acceptor of {(y, a, phi(y,a))} as padded triples, for state-table stackings:
// a finite union over (state, letter) of products (Nf ending at the state) x
// {a} x {table value}.
inline Fsa compile_state_table_graph(const AutostackableStructure& s) {
  if (s.stacking.kind != StackingMap::Kind::StateTable)
    raise("MalformedAutomaton", "graph compilation needs a state-table stacking");
  int n = s.alphabet.size();
  TupleAlphabet ta = s.graph_alphabet();
  auto reach = reachable_states(s.nf);
  std::vector<Fsa> pieces;
  for (int q = 0; q < s.nf.num_states; ++q) {
    if (!reach[static_cast<size_t>(q)] || !s.nf.accepting[static_cast<size_t>(q)]) continue;
    Fsa nf_q = s.nf;
    nf_q.accepting.assign(static_cast<size_t>(nf_q.num_states), 0);
    nf_q.accepting[static_cast<size_t>(q)] = 1;
    for (int a = 0; a < n; ++a) {
      const Word& u = s.stacking.table[static_cast<size_t>(q) * n + static_cast<size_t>(a)];
      pieces.push_back(minimize(product(ta, minimize(nf_q), Fsa::single_word(n, Word{a}),
                                        Fsa::single_word(n, u))));
    }
  }
  if (pieces.empty()) return Fsa::reject_all(ta.num_symbols());
  return minimize(unite_many(pieces));
}

inline bool graph_phi_membership(const AutostackableStructure& s, const Word& y, LetterId a,
                                 const Word& u) {
  if (!s.graph_phi) raise("MalformedAutomaton", "structure has no compiled stacking graph");
  return accepts(*s.graph_phi, convolve(s.graph_alphabet(), {y, Word{a}, u}));
}

struct CrossCheckResult {
  bool ok = true;
  long long checked = 0;
  std::vector<std::string> issues;
};

// Exhaustive agreement between the compiled graph and direct evaluation: for
// every accepted y up to max_len and every letter a, the graph must accept
// exactly (y, a, phi_eval(y,a)) among third tapes of length <= bound, and
// accept nothing with a longer third tape at all.
inline CrossCheckResult graph_phi_cross_check(const AutostackableStructure& s, int max_len) {
  if (!s.graph_phi) raise("MalformedAutomaton", "structure has no compiled stacking graph");
  CrossCheckResult res;
  int n = s.alphabet.size();
  TupleAlphabet ta = s.graph_alphabet();
  // no accepted triple may have a third tape longer than the bound
  {
    Fsa counter;
    int cap = s.bound + 1;
    counter.num_symbols = ta.num_symbols();
    counter.num_states = cap + 1;
    counter.start = 0;
    counter.accepting.assign(static_cast<size_t>(cap) + 1, 0);
    counter.accepting[static_cast<size_t>(cap)] = 1;
    counter.trans.resize(static_cast<size_t>(counter.num_states) * counter.num_symbols);
    for (int st = 0; st <= cap; ++st)
      for (int c = 0; c < counter.num_symbols; ++c) {
        auto d = ta.decode(c);
        int nxt = st;
        if (d[2] != ta.pad_digit(2)) nxt = std::min(st + 1, cap);
        counter.trans[static_cast<size_t>(st) * counter.num_symbols + c] = nxt;
      }
    if (!is_empty(intersect(*s.graph_phi, counter))) {
      res.ok = false;
      res.issues.push_back("graph accepts a triple whose third tape exceeds the bound " +
                           std::to_string(s.bound));
    }
  }
  std::vector<Word> candidates = enumerate_upto(Fsa::sigma_star(n), s.bound);
  for (const Word& y : enumerate_upto(s.nf, max_len)) {
    for (int a = 0; a < n; ++a) {
      Word u = phi_eval(s, y, a);
      for (const Word& c : candidates) {
        bool member = accepts(*s.graph_phi, convolve(ta, {y, Word{a}, c}));
        bool expect = (c == u);
        ++res.checked;
        if (member != expect) {
          res.ok = false;
          if (res.issues.size() < 20)
            res.issues.push_back("triple (" + format_word(s.alphabet, y) + ", " +
                                 s.alphabet.name(a) + ", " + format_word(s.alphabet, c) + ") " +
                                 (member ? "accepted but phi disagrees" : "missing from graph"));
        }
      }
    }
  }
  return res;
}

}  // namespace autostack
