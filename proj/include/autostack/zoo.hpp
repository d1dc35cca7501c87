#pragma once

#include <functional>
#include <string>
#include <vector>

#include "autostack/constructions.hpp"
#include "autostack/oracles.hpp"
#include "autostack/stacking.hpp"

namespace autostack {
namespace zoo {

// ---- Free abelian groups, one signed run per generator, ascending. ----
//
// The only non-tree edges append an earlier generator after a later run; the
// stacking conjugates it one step leftward past the last run letter.
inline AutostackableStructure make_free_abelian(const std::vector<std::string>& base_names) {
  AutostackableStructure s;
  s.alphabet = Alphabet::with_inverses(base_names);
  int nb = static_cast<int>(base_names.size());
  int n = s.alphabet.size();
  // states: 0 = start, 1 + 2*i + sign = inside run of generator i, last = dead
  int dead = 1 + 2 * nb;
  Fsa m;
  m.num_symbols = n;
  m.num_states = dead + 1;
  m.start = 0;
  m.accepting.assign(static_cast<size_t>(m.num_states), 1);
  m.accepting[static_cast<size_t>(dead)] = 0;
  m.trans.assign(static_cast<size_t>(m.num_states) * n, dead);
  auto run_state = [](int base, int sgn) { return 1 + 2 * base + sgn; };
  for (int i = 0; i < nb; ++i)
    for (int sg = 0; sg < 2; ++sg) {
      m.next_ref(0, 2 * i + sg) = run_state(i, sg);
      for (int j = 0; j < nb; ++j)
        for (int tg = 0; tg < 2; ++tg)
          if (j > i || (j == i && tg == sg))
            m.next_ref(run_state(i, sg), 2 * j + tg) = run_state(j, tg);
    }
  s.nf = m;
  s.bound = 3;
  s.stacking.kind = StackingMap::Kind::StateTable;
  s.stacking.table.assign(static_cast<size_t>(m.num_states) * n, Word{});
  for (int q = 0; q < m.num_states; ++q)
    for (int x = 0; x < n; ++x) {
      Word& cell = s.stacking.table[static_cast<size_t>(q) * n + x];
      int xb = x / 2;
      int qb = (q >= 1 && q < dead) ? (q - 1) / 2 : -1;
      if (qb >= 0 && xb < qb) {
        int run_letter = 2 * qb + ((q - 1) % 2);
        cell = Word{s.alphabet.inverse(run_letter), x, run_letter};
      } else {
        cell = Word{x};
      }
    }
  return s;
}

inline ElementOracle free_abelian_oracle(const std::vector<std::string>& base_names) {
  return integer_vector_oracle(base_names);
}

// ---- Free groups: freely reduced words, cancellation rules only. ----
inline AutostackableStructure make_free_group(const std::vector<std::string>& base_names) {
  RewritingSystem rs;
  rs.alphabet = Alphabet::with_inverses(base_names);
  for (int x = 0; x < rs.alphabet.size(); ++x)
    rs.rules.push_back({Word{x, rs.alphabet.inverse(x)}, Word{}});
  return from_rewriting_system(rs);
}

// ---- Free product of Z/2 and Z/3. ----
inline AutostackableStructure make_c2_star_c3() {
  RewritingSystem rs;
  rs.alphabet = Alphabet::with_inverses({"a", "b"});
  const Alphabet& al = rs.alphabet;
  auto r = [&](const std::string& l, const std::string& rr) {
    rs.rules.push_back({parse_word(al, l), parse_word(al, rr)});
  };
  r("a^-1", "a");
  r("a a", "");
  r("b b", "b^-1");
  r("b^-1 b^-1", "b");
  r("b b^-1", "");
  r("b^-1 b", "");
  return from_rewriting_system(rs);
}

inline ElementOracle c2_star_c3_oracle() {
  Alphabet a = Alphabet::with_inverses({"a", "b"});
  return free_product_cyclic_oracle(a, {{"a", 2}, {"b", 3}});
}

// ---- Klein bottle group <a, b | b a b^-1 = a^-1>, normal forms a^m b^n. ----
inline AutostackableStructure make_klein_bottle() {
  RewritingSystem rs;
  rs.alphabet = Alphabet::with_inverses({"a", "b"});
  const Alphabet& al = rs.alphabet;
  auto r = [&](const std::string& l, const std::string& rr) {
    rs.rules.push_back({parse_word(al, l), parse_word(al, rr)});
  };
  r("a a^-1", "");
  r("a^-1 a", "");
  r("b b^-1", "");
  r("b^-1 b", "");
  r("b a", "a^-1 b");
  r("b a^-1", "a b");
  r("b^-1 a", "a^-1 b^-1");
  r("b^-1 a^-1", "a b^-1");
  return from_rewriting_system(rs);
}

inline ElementOracle klein_bottle_oracle() {
  Alphabet a = Alphabet::with_inverses({"a", "b"});
  return affine_oracle(a, {{-1}}, 0, {{"a", {{1}, 0}}, {"b", {{0}, 1}}});
}

// ---- Z with a distinguished finite-index subgroup mZ. ----
//
// Letters a and X with X representing a^m; normal forms X^s a^r, 0 <= r < m.
// The stacking conjugates a misplaced X past the a-run (length 2r+1) and
// expresses inverse-direction a letters through X^-1.
inline RespectingStructure make_z_respecting_mz(int m, const std::string& a_name = "a",
                                                const std::string& x_name = "X") {
  if (m < 2) raise("MalformedSystem", "subgroup index must be at least 2");
  AutostackableStructure s;
  s.alphabet = Alphabet::from_pairs({{a_name, a_name + "^-1"}, {x_name, x_name + "^-1"}});
  const LetterId A = 0, Ai = 1, X = 2, Xi = 3;
  // states: 0 start, 1 = X-run, 2 = X^-1-run, 2+r = a^r (r = 1..m-1), dead
  int dead = 2 + m;
  Fsa nf;
  nf.num_symbols = 4;
  nf.num_states = dead + 1;
  nf.start = 0;
  nf.accepting.assign(static_cast<size_t>(nf.num_states), 1);
  nf.accepting[static_cast<size_t>(dead)] = 0;
  nf.trans.assign(static_cast<size_t>(nf.num_states) * 4, dead);
  nf.next_ref(0, X) = 1;
  nf.next_ref(0, Xi) = 2;
  nf.next_ref(0, A) = 3;
  nf.next_ref(1, X) = 1;
  nf.next_ref(1, A) = 3;
  nf.next_ref(2, Xi) = 2;
  nf.next_ref(2, A) = 3;
  for (int r = 1; r < m - 1; ++r) nf.next_ref(2 + r, A) = 2 + r + 1;
  s.nf = nf;
  s.bound = 2 * m - 1;

  Word inv_a_value;  // a^-1 = X^-1 a^(m-1)
  inv_a_value.push_back(Xi);
  for (int i = 0; i < m - 1; ++i) inv_a_value.push_back(A);
  Word wrap_a_value;  // at a^(m-1), one more a becomes a^-(m-1) X
  for (int i = 0; i < m - 1; ++i) wrap_a_value.push_back(Ai);
  wrap_a_value.push_back(X);

  s.stacking.kind = StackingMap::Kind::StateTable;
  s.stacking.table.assign(static_cast<size_t>(nf.num_states) * 4, Word{});
  for (int q = 0; q < nf.num_states; ++q)
    for (int x = 0; x < 4; ++x) s.stacking.table[static_cast<size_t>(q) * 4 + x] = Word{x};
  auto cell = [&](int q, LetterId x) -> Word& {
    return s.stacking.table[static_cast<size_t>(q) * 4 + static_cast<size_t>(x)];
  };
  for (int q : {0, 1, 2}) cell(q, Ai) = inv_a_value;
  for (int r = 1; r <= m - 1; ++r) {
    int q = 2 + r;
    if (r == m - 1) cell(q, A) = wrap_a_value;
    Word conj_x, conj_xi;
    for (int i = 0; i < r; ++i) conj_x.push_back(Ai);
    conj_xi = conj_x;
    conj_x.push_back(X);
    conj_xi.push_back(Xi);
    for (int i = 0; i < r; ++i) {
      conj_x.push_back(A);
      conj_xi.push_back(A);
    }
    cell(q, X) = conj_x;
    cell(q, Xi) = conj_xi;
  }
  return split_respecting(s, {x_name}, intersect(s.nf, Fsa::words_over(4, {A})));
}

inline ElementOracle z_respecting_mz_oracle(int m, const std::string& a_name = "a",
                                            const std::string& x_name = "X") {
  Alphabet a = Alphabet::from_pairs({{a_name, a_name + "^-1"}, {x_name, x_name + "^-1"}});
  return affine_oracle(a, {{1}}, 0,
                       {{a_name, {{1}, 0}}, {x_name, {{static_cast<long long>(m)}, 0}}});
}

}  // namespace zoo
}  // namespace autostack
