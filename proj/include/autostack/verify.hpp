#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "autostack/fsa.hpp"
#include "autostack/oracles.hpp"
#include "autostack/stacking.hpp"

namespace autostack {

// Checks the defining properties of a structure against an independent
// element oracle over a finite window. Passing is evidence, not proof; the
// `checked` counter and coverage notes say how much was exercised.
struct CheckResult {
  std::string name;
  bool passed = true;
  long long checked = 0;
  std::vector<std::string> notes;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool ok() const {
    for (const CheckResult& c : checks)
      if (!c.passed) return false;
    return true;
  }
  std::string summary() const {
    std::string out;
    for (const CheckResult& c : checks) {
      out += (c.passed ? "PASS " : "FAIL ") + c.name + " (checked " +
             std::to_string(c.checked) + ")\n";
      for (const std::string& n : c.notes) out += "  - " + n + "\n";
    }
    return out;
  }
};

struct VerifyOptions {
  int radius = 3;       // length cap on normal-form words for the edge sweeps
  int ball_radius = 2;  // oracle ball used for the completeness half of uniqueness
  int nf_length = -1;   // normal-form length cap for uniqueness; default 2*ball_radius
  size_t max_notes = 8;
};

namespace detail {

inline void note(CheckResult& c, const VerifyOptions& opts, const std::string& msg) {
  if (c.notes.size() < opts.max_notes) c.notes.push_back(msg);
}

inline std::string show(const Alphabet& a, const Word& w) {
  return w.empty() ? std::string("<empty>") : format_word(a, w);
}

}  // namespace detail

// Every flow value stays within the bound and labels a path with the same
// endpoints as the edge it replaces.
inline CheckResult check_f1(const AutostackableStructure& s, const ElementOracle& o,
                            const VerifyOptions& opts = {}) {
  CheckResult c;
  c.name = "flow_endpoints";
  for (const Word& y : enumerate_upto(s.nf, opts.radius)) {
    for (int a = 0; a < s.alphabet.size(); ++a) {
      ++c.checked;
      Word u;
      try {
        u = phi_eval(s, y, a);
      } catch (const Error& e) {
        c.passed = false;
        detail::note(c, opts, std::string("evaluation failed at (") + detail::show(s.alphabet, y) +
                                 ", " + s.alphabet.name(a) + "): " + e.what());
        continue;
      }
      if (static_cast<int>(u.size()) > s.bound) {
        c.passed = false;
        detail::note(c, opts, "value at (" + detail::show(s.alphabet, y) + ", " +
                                 s.alphabet.name(a) + ") has length " +
                                 std::to_string(u.size()) + " > bound " +
                                 std::to_string(s.bound));
        continue;
      }
      if (o.eval(cat(y, u)) != o.eval(cat(y, Word{a}))) {
        c.passed = false;
        detail::note(c, opts, "flow of (" + detail::show(s.alphabet, y) + ", " +
                                 s.alphabet.name(a) + ") ends at the wrong vertex: got '" +
                                 detail::show(s.alphabet, u) + "'");
      }
    }
  }
  return c;
}

// Spanning-tree edges are fixed by the stacking.
inline CheckResult check_f2(const AutostackableStructure& s, const VerifyOptions& opts = {}) {
  CheckResult c;
  c.name = "tree_edges_fixed";
  for (const Word& y : enumerate_upto(s.nf, opts.radius)) {
    for (int a = 0; a < s.alphabet.size(); ++a) {
      if (!in_tree(s, y, a)) continue;
      ++c.checked;
      Word u;
      try {
        u = phi_eval(s, y, a);
      } catch (const Error& e) {
        c.passed = false;
        detail::note(c, opts, std::string("evaluation failed at (") + detail::show(s.alphabet, y) +
                                 ", " + s.alphabet.name(a) + "): " + e.what());
        continue;
      }
      if (u != Word{a}) {
        c.passed = false;
        detail::note(c, opts, "tree edge (" + detail::show(s.alphabet, y) + ", " +
                                 s.alphabet.name(a) + ") maps to '" +
                                 detail::show(s.alphabet, u) + "' instead of itself");
      }
    }
  }
  return c;
}

// No directed cycles in the expansion relation: the non-tree edge e_{y,a}
// points to every non-tree edge crossed by the path phi(y,a) out of y. The
// sweep works on oracle keys, so a cycle is found even where the rewriting
// procedure itself would fail to terminate. Edges leaving the explored window
// are reported as coverage notes, not failures.
inline CheckResult check_f3_acyclic(const AutostackableStructure& s, const ElementOracle& o,
                                    const VerifyOptions& opts = {}) {
  CheckResult c;
  c.name = "flow_terminates";
  std::unordered_map<std::string, Word> dict;
  for (const Word& y : enumerate_upto(s.nf, opts.radius)) dict.emplace(o.eval(y), y);

  using Node = std::pair<std::string, LetterId>;
  std::map<Node, std::vector<Node>> succ;
  long long escaped = 0;
  for (const auto& [key, y] : dict) {
    for (int a = 0; a < s.alphabet.size(); ++a) {
      if (in_tree(s, y, a)) continue;
      Node me{key, a};
      auto& out = succ[me];
      Word u;
      try {
        u = phi_eval(s, y, a);
      } catch (const Error& e) {
        c.passed = false;
        detail::note(c, opts, std::string("evaluation failed at (") + detail::show(s.alphabet, y) +
                                 ", " + s.alphabet.name(a) + "): " + e.what());
        continue;
      }
      ++c.checked;
      std::string cur = key;
      for (LetterId x : u) {
        auto it = dict.find(cur);
        if (it == dict.end()) {
          ++escaped;
          break;
        }
        const Word& w = it->second;
        if (!in_tree(s, w, x)) out.push_back({cur, x});
        cur = o.eval(cat(w, Word{x}));
      }
    }
  }

  // iterative three-colour depth-first search
  std::map<Node, int> colour;  // 0 white, 1 grey, 2 black
  for (const auto& [start, ignored] : succ) {
    if (colour[start] != 0) continue;
    std::vector<std::pair<Node, size_t>> stack{{start, 0}};
    colour[start] = 1;
    while (!stack.empty()) {
      auto& [node, idx] = stack.back();
      const auto& nbrs = succ[node];
      if (idx == nbrs.size()) {
        colour[node] = 2;
        stack.pop_back();
        continue;
      }
      Node nxt = nbrs[idx++];
      int col = colour[nxt];
      if (col == 1) {
        c.passed = false;
        std::string cyc;
        bool in_cycle = false;
        for (const auto& [n, i] : stack) {
          if (n == nxt) in_cycle = true;
          if (in_cycle)
            cyc += "(" + detail::show(s.alphabet, dict[n.first]) + ", " +
                   s.alphabet.name(n.second) + ") -> ";
        }
        cyc += "(" + detail::show(s.alphabet, dict[nxt.first]) + ", " +
               s.alphabet.name(nxt.second) + ")";
        detail::note(c, opts, "flow cycle: " + cyc);
      } else if (col == 0) {
        colour[nxt] = 1;
        stack.push_back({nxt, 0});
      }
    }
  }
  if (escaped > 0)
    detail::note(c, opts, std::to_string(escaped) +
                              " flow paths left the explored window (coverage only)");
  return c;
}

// The accepted language hits every group element exactly once: no two normal
// forms share an oracle key, and every element of the oracle ball has a
// normal form within the length cap.
inline CheckResult check_uniqueness(const AutostackableStructure& s, const ElementOracle& o,
                                    const VerifyOptions& opts = {}) {
  CheckResult c;
  c.name = "normal_forms_unique";
  int nf_len = opts.nf_length > 0 ? opts.nf_length : 2 * opts.ball_radius;
  std::unordered_map<std::string, Word> seen;
  for (const Word& y : enumerate_upto(s.nf, nf_len)) {
    ++c.checked;
    auto [it, fresh] = seen.emplace(o.eval(y), y);
    if (!fresh) {
      c.passed = false;
      detail::note(c, opts, "two normal forms for one element: '" +
                               detail::show(s.alphabet, it->second) + "' and '" +
                               detail::show(s.alphabet, y) + "'");
    }
  }
  Ball ball = ball_enumerate(o, opts.ball_radius);
  for (int i = 0; i < ball.size(); ++i) {
    ++c.checked;
    if (!seen.count(ball.keys[static_cast<size_t>(i)])) {
      c.passed = false;
      detail::note(c, opts, "no normal form of length <= " + std::to_string(nf_len) +
                               " for the element '" +
                               detail::show(s.alphabet, ball.witnesses[static_cast<size_t>(i)]) +
                               "'");
    }
  }
  return c;
}

inline VerificationReport verify_structure(const AutostackableStructure& s,
                                           const ElementOracle& o,
                                           const VerifyOptions& opts = {}) {
  VerificationReport rep;
  rep.checks.push_back(check_uniqueness(s, o, opts));
  rep.checks.push_back(check_f1(s, o, opts));
  rep.checks.push_back(check_f2(s, opts));
  rep.checks.push_back(check_f3_acyclic(s, o, opts));
  if (s.graph_phi) {
    CrossCheckResult g = graph_phi_cross_check(s, opts.radius);
    CheckResult c;
    c.name = "stacking_graph";
    c.passed = g.ok;
    c.checked = g.checked;
    for (const std::string& issue : g.issues)
      if (c.notes.size() < opts.max_notes) c.notes.push_back(issue);
    rep.checks.push_back(c);
  }
  return rep;
}

// For structures carrying a subgroup splitting: the normal forms factor
// exactly as (subgroup part) . (transversal part), the split point of each
// normal form is unique, and the subgroup normal forms are closed under
// products and inverses of the elements they name.
inline CheckResult check_respecting(const RespectingStructure& r, const ElementOracle& o,
                                    const VerifyOptions& opts = {}) {
  CheckResult c;
  c.name = "subgroup_respected";
  const AutostackableStructure& s = r.base;
  const Alphabet& al = s.alphabet;

  if (!accepts(r.nf_h, Word{})) {
    c.passed = false;
    detail::note(c, opts, "subgroup normal forms miss the empty word");
  }
  if (!accepts(r.nf_tr, Word{})) {
    c.passed = false;
    detail::note(c, opts, "transversal normal forms miss the empty word");
  }
  for (LetterId b : r.subgroup_letters)
    if (std::find(r.subgroup_letters.begin(), r.subgroup_letters.end(), al.inverse(b)) ==
        r.subgroup_letters.end()) {
      c.passed = false;
      detail::note(c, opts, "subgroup alphabet is not inverse closed at " + al.name(b));
    }

  std::vector<LetterId> b_letters = r.subgroup_letters;
  Fsa over_b = Fsa::words_over(al.size(), b_letters);
  ++c.checked;
  if (!equivalent(intersect(r.nf_h, over_b), r.nf_h)) {
    c.passed = false;
    detail::note(c, opts, "subgroup normal forms use letters outside the subgroup alphabet");
  }
  ++c.checked;
  if (!equivalent(s.nf, concat(r.nf_h, r.nf_tr))) {
    c.passed = false;
    detail::note(c, opts, "normal forms do not factor as subgroup part . transversal part");
  }

  for (const Word& y : enumerate_upto(s.nf, opts.radius)) {
    ++c.checked;
    int splits = 0;
    for (size_t i = 0; i <= y.size(); ++i)
      if (accepts(r.nf_h, prefix(y, i)) && accepts(r.nf_tr, suffix_from(y, i))) ++splits;
    if (splits != 1) {
      c.passed = false;
      detail::note(c, opts, "normal form '" + detail::show(al, y) + "' has " +
                               std::to_string(splits) + " factorizations, want exactly 1");
    }
  }

  std::vector<Word> hs = enumerate_upto(r.nf_h, opts.radius);
  for (const Word& u : hs) {
    ++c.checked;
    Word w = normal_form(s, invert(al, u));
    if (!accepts(r.nf_h, w)) {
      c.passed = false;
      detail::note(c, opts, "inverse of subgroup element '" + detail::show(al, u) +
                               "' normalizes outside the subgroup language");
    }
    for (const Word& v : hs) {
      ++c.checked;
      Word p = normal_form(s, cat(u, v));
      if (!accepts(r.nf_h, p)) {
        c.passed = false;
        detail::note(c, opts, "product of subgroup elements '" + detail::show(al, u) +
                                 "' . '" + detail::show(al, v) +
                                 "' normalizes outside the subgroup language");
        break;
      }
    }
  }
  (void)o;
  return c;
}

inline VerificationReport verify_respecting(const RespectingStructure& r, const ElementOracle& o,
                                            const VerifyOptions& opts = {}) {
  VerificationReport rep = verify_structure(r.base, o, opts);
  rep.checks.push_back(check_respecting(r, o, opts));
  return rep;
}

}  // namespace autostack
