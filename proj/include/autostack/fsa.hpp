#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "autostack/errors.hpp"
#include "autostack/words.hpp"

namespace autostack {

// Deterministic complete finite-state acceptor. Every (state, symbol) pair has
// a transition; "dead" states are ordinary non-accepting sinks. Symbols are
// 0..num_symbols-1; callers attach meaning (alphabet letters, tuple letters).
struct Fsa {
  int num_symbols = 0;
  int num_states = 0;
  int start = 0;
  std::vector<char> accepting;  // size num_states
  std::vector<int> trans;       // size num_states * num_symbols

  int next(int q, int s) const { return trans[static_cast<size_t>(q) * num_symbols + s]; }
  int& next_ref(int q, int s) { return trans[static_cast<size_t>(q) * num_symbols + s]; }

  void validate() const {
    if (num_symbols <= 0) raise("MalformedAutomaton", "automaton needs at least one symbol");
    if (num_states <= 0) raise("MalformedAutomaton", "automaton needs at least one state");
    if (start < 0 || start >= num_states) raise("MalformedAutomaton", "start state out of range");
    if (static_cast<int>(accepting.size()) != num_states ||
        trans.size() != static_cast<size_t>(num_states) * num_symbols)
      raise("MalformedAutomaton", "table sizes do not match state/symbol counts");
    for (int t : trans)
      if (t < 0 || t >= num_states) raise("MalformedAutomaton", "transition target out of range");
  }

  static Fsa reject_all(int nsym) {
    Fsa m;
    m.num_symbols = nsym;
    m.num_states = 1;
    m.start = 0;
    m.accepting = {0};
    m.trans.assign(static_cast<size_t>(nsym), 0);
    return m;
  }

  static Fsa sigma_star(int nsym) {
    Fsa m = reject_all(nsym);
    m.accepting[0] = 1;
    return m;
  }

  static Fsa epsilon_only(int nsym) {
    Fsa m;
    m.num_symbols = nsym;
    m.num_states = 2;
    m.start = 0;
    m.accepting = {1, 0};
    m.trans.assign(2 * static_cast<size_t>(nsym), 1);
    return m;
  }

  static Fsa single_word(int nsym, const Word& w) {
    Fsa m;
    m.num_symbols = nsym;
    int n = static_cast<int>(w.size());
    m.num_states = n + 2;  // chain + dead
    m.start = 0;
    int dead = n + 1;
    m.accepting.assign(static_cast<size_t>(m.num_states), 0);
    m.accepting[static_cast<size_t>(n)] = 1;
    m.trans.assign(static_cast<size_t>(m.num_states) * nsym, dead);
    for (int i = 0; i < n; ++i) m.next_ref(i, w[static_cast<size_t>(i)]) = i + 1;
    return m;
  }

  // All words over the given symbol set (a subset of 0..nsym-1).
  static Fsa words_over(int nsym, const std::vector<int>& symbols) {
    Fsa m;
    m.num_symbols = nsym;
    m.num_states = 2;
    m.start = 0;
    m.accepting = {1, 0};
    m.trans.assign(2 * static_cast<size_t>(nsym), 1);
    for (int s : symbols) m.next_ref(0, s) = 0;
    return m;
  }
};

inline int walk_from(const Fsa& m, int q, const Word& w) {
  for (LetterId x : w) {
    if (x < 0 || x >= m.num_symbols) raise("UnknownLetter", "symbol out of range for automaton");
    q = m.next(q, x);
  }
  return q;
}

inline int walk(const Fsa& m, const Word& w) { return walk_from(m, m.start, w); }

inline bool accepts(const Fsa& m, const Word& w) {
  return m.accepting[static_cast<size_t>(walk(m, w))] != 0;
}

inline std::vector<char> reachable_states(const Fsa& m) {
  std::vector<char> seen(static_cast<size_t>(m.num_states), 0);
  std::queue<int> bfs;
  bfs.push(m.start);
  seen[static_cast<size_t>(m.start)] = 1;
  while (!bfs.empty()) {
    int q = bfs.front();
    bfs.pop();
    for (int s = 0; s < m.num_symbols; ++s) {
      int r = m.next(q, s);
      if (!seen[static_cast<size_t>(r)]) {
        seen[static_cast<size_t>(r)] = 1;
        bfs.push(r);
      }
    }
  }
  return seen;
}

// States from which some accepting state is reachable.
inline std::vector<char> coreachable_states(const Fsa& m) {
  std::vector<std::vector<int>> rev(static_cast<size_t>(m.num_states));
  for (int q = 0; q < m.num_states; ++q)
    for (int s = 0; s < m.num_symbols; ++s) rev[static_cast<size_t>(m.next(q, s))].push_back(q);
  std::vector<char> live(static_cast<size_t>(m.num_states), 0);
  std::queue<int> bfs;
  for (int q = 0; q < m.num_states; ++q)
    if (m.accepting[static_cast<size_t>(q)]) {
      live[static_cast<size_t>(q)] = 1;
      bfs.push(q);
    }
  while (!bfs.empty()) {
    int q = bfs.front();
    bfs.pop();
    for (int p : rev[static_cast<size_t>(q)])
      if (!live[static_cast<size_t>(p)]) {
        live[static_cast<size_t>(p)] = 1;
        bfs.push(p);
      }
  }
  return live;
}

inline bool is_empty(const Fsa& m) {
  auto seen = reachable_states(m);
  for (int q = 0; q < m.num_states; ++q)
    if (seen[static_cast<size_t>(q)] && m.accepting[static_cast<size_t>(q)]) return false;
  return true;
}

inline Fsa complement(const Fsa& m) {
  Fsa out = m;
  for (auto& a : out.accepting) a = a ? 0 : 1;
  return out;
}

namespace detail {

template <typename AcceptFn>
Fsa product_op(const Fsa& a, const Fsa& b, AcceptFn keep) {
  if (a.num_symbols != b.num_symbols)
    raise("MalformedAutomaton", "boolean operation on automata over different alphabets");
  std::map<std::pair<int, int>, int> id;
  std::vector<std::pair<int, int>> states;
  auto intern = [&](int p, int q) {
    auto key = std::make_pair(p, q);
    auto it = id.find(key);
    if (it != id.end()) return it->second;
    int n = static_cast<int>(states.size());
    id[key] = n;
    states.push_back(key);
    return n;
  };
  Fsa out;
  out.num_symbols = a.num_symbols;
  out.start = intern(a.start, b.start);
  for (size_t i = 0; i < states.size(); ++i) {
    auto [p, q] = states[i];
    for (int s = 0; s < a.num_symbols; ++s) intern(a.next(p, s), b.next(q, s));
  }
  out.num_states = static_cast<int>(states.size());
  out.accepting.resize(states.size());
  out.trans.resize(states.size() * static_cast<size_t>(a.num_symbols));
  for (size_t i = 0; i < states.size(); ++i) {
    auto [p, q] = states[i];
    out.accepting[i] = keep(a.accepting[static_cast<size_t>(p)] != 0,
                            b.accepting[static_cast<size_t>(q)] != 0)
                           ? 1
                           : 0;
    for (int s = 0; s < a.num_symbols; ++s)
      out.trans[i * static_cast<size_t>(a.num_symbols) + s] =
          id[{a.next(p, s), b.next(q, s)}];
  }
  return out;
}

}  // namespace detail

inline Fsa intersect(const Fsa& a, const Fsa& b) {
  return detail::product_op(a, b, [](bool x, bool y) { return x && y; });
}

inline Fsa unite(const Fsa& a, const Fsa& b) {
  return detail::product_op(a, b, [](bool x, bool y) { return x || y; });
}

inline Fsa difference(const Fsa& a, const Fsa& b) {
  return detail::product_op(a, b, [](bool x, bool y) { return x && !y; });
}

inline bool equivalent(const Fsa& a, const Fsa& b) {
  return is_empty(detail::product_op(a, b, [](bool x, bool y) { return x != y; }));
}

// Shortest word accepted, in shortlex order; nullopt for the empty language.
inline std::optional<Word> shortest_accepted(const Fsa& m) {
  std::vector<int> from(static_cast<size_t>(m.num_states), -1);
  std::vector<int> via(static_cast<size_t>(m.num_states), -1);
  std::vector<char> seen(static_cast<size_t>(m.num_states), 0);
  std::queue<int> bfs;
  bfs.push(m.start);
  seen[static_cast<size_t>(m.start)] = 1;
  int goal = m.accepting[static_cast<size_t>(m.start)] ? m.start : -1;
  while (!bfs.empty() && goal < 0) {
    int q = bfs.front();
    bfs.pop();
    for (int s = 0; s < m.num_symbols && goal < 0; ++s) {
      int r = m.next(q, s);
      if (!seen[static_cast<size_t>(r)]) {
        seen[static_cast<size_t>(r)] = 1;
        from[static_cast<size_t>(r)] = q;
        via[static_cast<size_t>(r)] = s;
        if (m.accepting[static_cast<size_t>(r)]) goal = r;
        bfs.push(r);
      }
    }
  }
  if (goal < 0) return std::nullopt;
  Word w;
  for (int q = goal; from[static_cast<size_t>(q)] != -1; q = from[static_cast<size_t>(q)])
    w.push_back(via[static_cast<size_t>(q)]);
  std::reverse(w.begin(), w.end());
  return w;
}

// Nondeterministic automaton with epsilon moves; internal stepping stone for
// concatenation, star, unions and homomorphic images.
struct Nfa {
  int num_symbols = 0;
  int num_states = 0;
  int start = 0;
  std::vector<char> accepting;
  std::vector<std::vector<std::pair<int, int>>> edges;  // per state: (symbol, target)
  std::vector<std::vector<int>> eps;                    // per state: targets

  int add_state(bool acc = false) {
    accepting.push_back(acc ? 1 : 0);
    edges.emplace_back();
    eps.emplace_back();
    return num_states++;
  }

  static Nfa from_fsa(const Fsa& m) {
    Nfa n;
    n.num_symbols = m.num_symbols;
    for (int q = 0; q < m.num_states; ++q) n.add_state(m.accepting[static_cast<size_t>(q)] != 0);
    n.start = m.start;
    for (int q = 0; q < m.num_states; ++q)
      for (int s = 0; s < m.num_symbols; ++s) n.edges[static_cast<size_t>(q)].push_back({s, m.next(q, s)});
    return n;
  }

  // Appends a disjoint copy of `other`; returns the state-id offset.
  int absorb(const Nfa& other) {
    int off = num_states;
    for (int q = 0; q < other.num_states; ++q) add_state(other.accepting[static_cast<size_t>(q)] != 0);
    for (int q = 0; q < other.num_states; ++q) {
      for (auto [s, r] : other.edges[static_cast<size_t>(q)])
        edges[static_cast<size_t>(off + q)].push_back({s, off + r});
      for (int r : other.eps[static_cast<size_t>(q)]) eps[static_cast<size_t>(off + q)].push_back(off + r);
    }
    return off;
  }
};

inline Fsa determinize(const Nfa& n) {
  auto closure = [&](std::set<int>& states) {
    std::vector<int> work(states.begin(), states.end());
    while (!work.empty()) {
      int q = work.back();
      work.pop_back();
      for (int r : n.eps[static_cast<size_t>(q)])
        if (states.insert(r).second) work.push_back(r);
    }
  };
  std::map<std::vector<int>, int> id;
  std::vector<std::vector<int>> subsets;
  auto intern = [&](std::set<int>& s) {
    std::vector<int> key(s.begin(), s.end());
    auto it = id.find(key);
    if (it != id.end()) return it->second;
    int k = static_cast<int>(subsets.size());
    id[key] = k;
    subsets.push_back(key);
    return k;
  };
  std::set<int> s0{n.start};
  closure(s0);
  Fsa out;
  out.num_symbols = n.num_symbols;
  out.start = intern(s0);
  std::vector<int> table;
  std::vector<char> acc;
  for (size_t i = 0; i < subsets.size(); ++i) {
    std::vector<int> cur = subsets[i];
    bool a = false;
    for (int q : cur) a = a || n.accepting[static_cast<size_t>(q)];
    acc.push_back(a ? 1 : 0);
    for (int s = 0; s < n.num_symbols; ++s) {
      std::set<int> tgt;
      for (int q : cur)
        for (auto [sym, r] : n.edges[static_cast<size_t>(q)])
          if (sym == s) tgt.insert(r);
      closure(tgt);
      table.push_back(intern(tgt));
    }
  }
  out.num_states = static_cast<int>(subsets.size());
  out.accepting = acc;
  out.trans = table;
  return out;
}

inline Fsa concat(const Fsa& a, const Fsa& b) {
  if (a.num_symbols != b.num_symbols)
    raise("MalformedAutomaton", "concatenation of automata over different alphabets");
  Nfa n = Nfa::from_fsa(a);
  int off = n.absorb(Nfa::from_fsa(b));
  for (int q = 0; q < a.num_states; ++q)
    if (a.accepting[static_cast<size_t>(q)]) {
      n.eps[static_cast<size_t>(q)].push_back(off + b.start);
      n.accepting[static_cast<size_t>(q)] = 0;
    }
  return determinize(n);
}

inline Fsa star(const Fsa& a) {
  Nfa n;
  n.num_symbols = a.num_symbols;
  int s = n.add_state(true);
  n.start = s;
  int off = n.absorb(Nfa::from_fsa(a));
  n.eps[static_cast<size_t>(s)].push_back(off + a.start);
  for (int q = 0; q < a.num_states; ++q)
    if (a.accepting[static_cast<size_t>(q)]) n.eps[static_cast<size_t>(off + q)].push_back(s);
  return determinize(n);
}

inline Fsa unite_many(const std::vector<Fsa>& parts) {
  if (parts.empty()) raise("MalformedAutomaton", "union of zero automata needs an alphabet");
  Nfa n;
  n.num_symbols = parts[0].num_symbols;
  int s = n.add_state(false);
  n.start = s;
  for (const Fsa& p : parts) {
    if (p.num_symbols != n.num_symbols)
      raise("MalformedAutomaton", "union of automata over different alphabets");
    int off = n.absorb(Nfa::from_fsa(p));
    n.eps[static_cast<size_t>(s)].push_back(off + p.start);
  }
  return determinize(n);
}

// L_x = { w : w x in L }; same transitions, accepting retargeted through x.
inline Fsa quotient_by_word(const Fsa& m, const Word& x) {
  Fsa out = m;
  for (int q = 0; q < m.num_states; ++q)
    out.accepting[static_cast<size_t>(q)] = m.accepting[static_cast<size_t>(walk_from(m, q, x))];
  return out;
}

// Image under the letter substitution s -> images[s] (words over a target
// alphabet with target_nsym symbols).
inline Fsa hom_image(const Fsa& m, int target_nsym, const std::vector<Word>& images) {
  if (static_cast<int>(images.size()) != m.num_symbols)
    raise("MalformedAutomaton", "substitution must cover every source symbol");
  Nfa n;
  n.num_symbols = target_nsym;
  for (int q = 0; q < m.num_states; ++q) n.add_state(m.accepting[static_cast<size_t>(q)] != 0);
  n.start = m.start;
  for (int q = 0; q < m.num_states; ++q)
    for (int s = 0; s < m.num_symbols; ++s) {
      const Word& w = images[static_cast<size_t>(s)];
      int tgt = m.next(q, s);
      if (w.empty()) {
        n.eps[static_cast<size_t>(q)].push_back(tgt);
        continue;
      }
      int cur = q;
      for (size_t i = 0; i < w.size(); ++i) {
        int nxt = (i + 1 == w.size()) ? tgt : n.add_state(false);
        n.edges[static_cast<size_t>(cur)].push_back({w[i], nxt});
        cur = nxt;
      }
    }
  return determinize(n);
}

// { w : images(w) in L } for the substitution s -> images[s].
inline Fsa hom_preimage(const Fsa& m, int source_nsym, const std::vector<Word>& images) {
  if (static_cast<int>(images.size()) != source_nsym)
    raise("MalformedAutomaton", "substitution must cover every source symbol");
  Fsa out;
  out.num_symbols = source_nsym;
  out.num_states = m.num_states;
  out.start = m.start;
  out.accepting = m.accepting;
  out.trans.resize(static_cast<size_t>(m.num_states) * source_nsym);
  for (int q = 0; q < m.num_states; ++q)
    for (int s = 0; s < source_nsym; ++s)
      out.trans[static_cast<size_t>(q) * source_nsym + s] =
          walk_from(m, q, images[static_cast<size_t>(s)]);
  return out;
}

// Same language read over a larger alphabet: symbol s of `m` becomes
// symbol_map[s]; symbols outside the image reject. symbol_map must be 1-1.
inline Fsa remap_symbols(const Fsa& m, int target_nsym, const std::vector<int>& symbol_map) {
  if (static_cast<int>(symbol_map.size()) != m.num_symbols)
    raise("MalformedAutomaton", "symbol map must cover every symbol");
  std::vector<int> back(static_cast<size_t>(target_nsym), -1);
  for (int s = 0; s < m.num_symbols; ++s) {
    int t = symbol_map[static_cast<size_t>(s)];
    if (t < 0 || t >= target_nsym || back[static_cast<size_t>(t)] != -1)
      raise("MalformedAutomaton", "symbol map must be injective into the target alphabet");
    back[static_cast<size_t>(t)] = s;
  }
  Fsa out;
  out.num_symbols = target_nsym;
  out.num_states = m.num_states + 1;
  int dead = m.num_states;
  out.start = m.start;
  out.accepting = m.accepting;
  out.accepting.push_back(0);
  out.trans.assign(static_cast<size_t>(out.num_states) * target_nsym, dead);
  for (int q = 0; q < m.num_states; ++q)
    for (int t = 0; t < target_nsym; ++t)
      if (back[static_cast<size_t>(t)] >= 0)
        out.trans[static_cast<size_t>(q) * target_nsym + t] = m.next(q, back[static_cast<size_t>(t)]);
  return out;
}

// Moore partition refinement, then canonical breadth-first renumbering, so two
// minimizations of the same language produce identical tables.
inline Fsa minimize(const Fsa& m) {
  auto seen = reachable_states(m);
  std::vector<int> cls(static_cast<size_t>(m.num_states));
  for (int q = 0; q < m.num_states; ++q) cls[static_cast<size_t>(q)] = m.accepting[static_cast<size_t>(q)] ? 1 : 0;
  for (;;) {
    std::map<std::vector<int>, int> sig_id;
    std::vector<int> next_cls(static_cast<size_t>(m.num_states), 0);
    for (int q = 0; q < m.num_states; ++q) {
      if (!seen[static_cast<size_t>(q)]) continue;
      std::vector<int> sig{cls[static_cast<size_t>(q)]};
      for (int s = 0; s < m.num_symbols; ++s) sig.push_back(cls[static_cast<size_t>(m.next(q, s))]);
      auto it = sig_id.find(sig);
      if (it == sig_id.end()) it = sig_id.emplace(sig, static_cast<int>(sig_id.size())).first;
      next_cls[static_cast<size_t>(q)] = it->second;
    }
    bool changed = false;
    for (int q = 0; q < m.num_states; ++q)
      if (seen[static_cast<size_t>(q)] && next_cls[static_cast<size_t>(q)] != cls[static_cast<size_t>(q)]) changed = true;
    cls = next_cls;
    if (!changed) break;
  }
  // representative per class, breadth-first from the start class
  std::map<int, int> renum;
  std::vector<int> order;
  std::vector<int> rep;
  std::queue<int> bfs;
  auto touch = [&](int q) {
    int c = cls[static_cast<size_t>(q)];
    if (renum.count(c)) return;
    renum[c] = static_cast<int>(order.size());
    order.push_back(c);
    rep.push_back(q);
    bfs.push(q);
  };
  touch(m.start);
  while (!bfs.empty()) {
    int q = bfs.front();
    bfs.pop();
    for (int s = 0; s < m.num_symbols; ++s) touch(m.next(q, s));
  }
  Fsa out;
  out.num_symbols = m.num_symbols;
  out.num_states = static_cast<int>(order.size());
  out.start = 0;
  out.accepting.resize(order.size());
  out.trans.resize(order.size() * static_cast<size_t>(m.num_symbols));
  for (size_t i = 0; i < order.size(); ++i) {
    int q = rep[i];
    out.accepting[i] = m.accepting[static_cast<size_t>(q)];
    for (int s = 0; s < m.num_symbols; ++s)
      out.trans[i * static_cast<size_t>(m.num_symbols) + s] = renum[cls[static_cast<size_t>(m.next(q, s))]];
  }
  return out;
}

inline Fsa determinize_minimize(const Nfa& n) { return minimize(determinize(n)); }

// Accepted words of length <= max_len in shortlex order. Exact lookahead
// pruning keeps the walk proportional to the output.
inline std::vector<Word> enumerate_upto(const Fsa& m, int max_len) {
  // can_finish[k][q]: an accepting state is reachable from q in exactly k steps
  std::vector<std::vector<char>> can_finish(static_cast<size_t>(max_len) + 1,
                                            std::vector<char>(static_cast<size_t>(m.num_states), 0));
  for (int q = 0; q < m.num_states; ++q) can_finish[0][static_cast<size_t>(q)] = m.accepting[static_cast<size_t>(q)];
  for (int k = 1; k <= max_len; ++k)
    for (int q = 0; q < m.num_states; ++q)
      for (int s = 0; s < m.num_symbols && !can_finish[static_cast<size_t>(k)][static_cast<size_t>(q)]; ++s)
        if (can_finish[static_cast<size_t>(k - 1)][static_cast<size_t>(m.next(q, s))])
          can_finish[static_cast<size_t>(k)][static_cast<size_t>(q)] = 1;
  std::vector<Word> out;
  Word cur;
  auto dfs = [&](auto&& self, int q, int remaining) -> void {
    if (remaining == 0) {
      if (m.accepting[static_cast<size_t>(q)]) out.push_back(cur);
      return;
    }
    for (int s = 0; s < m.num_symbols; ++s) {
      int r = m.next(q, s);
      if (!can_finish[static_cast<size_t>(remaining - 1)][static_cast<size_t>(r)]) continue;
      cur.push_back(s);
      self(self, r, remaining - 1);
      cur.pop_back();
    }
  };
  for (int len = 0; len <= max_len; ++len) dfs(dfs, m.start, len);
  return out;
}

// Prefix-closed: every prefix of an accepted word is accepted. Equivalent to
// "every reachable state that can still reach acceptance is accepting".
inline bool is_prefix_closed(const Fsa& m) {
  auto seen = reachable_states(m);
  auto live = coreachable_states(m);
  for (int q = 0; q < m.num_states; ++q)
    if (seen[static_cast<size_t>(q)] && live[static_cast<size_t>(q)] && !m.accepting[static_cast<size_t>(q)])
      return false;
  return true;
}

// Graphviz rendering; symbol_names[s] labels symbol s.
inline std::string export_dot(const Fsa& m, const std::vector<std::string>& symbol_names,
                              const std::string& graph_name = "fsa") {
  std::string out = "digraph " + graph_name + " {\n  rankdir=LR;\n  node [shape=circle];\n";
  out += "  __start [shape=point];\n";
  out += "  __start -> q" + std::to_string(m.start) + ";\n";
  for (int q = 0; q < m.num_states; ++q)
    if (m.accepting[static_cast<size_t>(q)])
      out += "  q" + std::to_string(q) + " [shape=doublecircle];\n";
  for (int q = 0; q < m.num_states; ++q) {
    // group parallel edges onto one arrow
    std::map<int, std::string> labels;
    for (int s = 0; s < m.num_symbols; ++s) {
      std::string nm = s < static_cast<int>(symbol_names.size()) ? symbol_names[static_cast<size_t>(s)]
                                                                 : std::to_string(s);
      auto& l = labels[m.next(q, s)];
      if (!l.empty()) l += ",";
      l += nm;
    }
    for (auto& [tgt, lbl] : labels)
      out += "  q" + std::to_string(q) + " -> q" + std::to_string(tgt) + " [label=\"" + lbl + "\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace autostack
