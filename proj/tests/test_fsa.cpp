#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <set>
#include <vector>

#include "autostack/fsa.hpp"
#include "autostack/words.hpp"

using namespace autostack;

namespace {

// all words over {0..nsym-1} of length <= max_len, shortlex order
std::vector<Word> all_words(int nsym, int max_len) {
  std::vector<Word> out{Word{}};
  size_t lo = 0;
  for (int len = 1; len <= max_len; ++len) {
    size_t hi = out.size();
    for (size_t i = lo; i < hi; ++i)
      for (int s = 0; s < nsym; ++s) {
        Word w = out[i];
        w.push_back(s);
        out.push_back(w);
      }
    lo = hi;
  }
  return out;
}

// L1 = words containing 01 as a factor, L2 = even number of 1s, over {0,1}
Fsa contains_01() {
  Fsa m;
  m.num_symbols = 2;
  m.num_states = 3;
  m.start = 0;
  m.accepting = {0, 0, 1};
  m.trans = {1, 0, 1, 2, 2, 2};
  m.validate();
  return m;
}

Fsa even_ones() {
  Fsa m;
  m.num_symbols = 2;
  m.num_states = 2;
  m.start = 0;
  m.accepting = {1, 0};
  m.trans = {0, 1, 1, 0};
  m.validate();
  return m;
}

bool brute_contains_01(const Word& w) {
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i] == 0 && w[i + 1] == 1) return true;
  return false;
}

bool brute_even_ones(const Word& w) {
  int c = 0;
  for (int x : w)
    if (x == 1) ++c;
  return c % 2 == 0;
}

}  // namespace

TEST_CASE("builders accept what they should") {
  REQUIRE(accepts(Fsa::sigma_star(2), Word{0, 1, 1}));
  REQUIRE(!accepts(Fsa::reject_all(2), Word{}));
  REQUIRE(accepts(Fsa::epsilon_only(2), Word{}));
  REQUIRE(!accepts(Fsa::epsilon_only(2), Word{0}));
  REQUIRE(accepts(Fsa::single_word(3, Word{2, 0}), Word{2, 0}));
  REQUIRE(!accepts(Fsa::single_word(3, Word{2, 0}), Word{2}));
  REQUIRE(accepts(Fsa::words_over(3, {0, 2}), Word{2, 0, 2}));
  REQUIRE(!accepts(Fsa::words_over(3, {0, 2}), Word{2, 1}));
}

TEST_CASE("boolean operations match brute force") {
  Fsa a = contains_01(), b = even_ones();
  for (const Word& w : all_words(2, 8)) {
    bool ba = brute_contains_01(w), bb = brute_even_ones(w);
    CAPTURE(w);
    REQUIRE(accepts(a, w) == ba);
    REQUIRE(accepts(b, w) == bb);
    REQUIRE(accepts(intersect(a, b), w) == (ba && bb));
    REQUIRE(accepts(unite(a, b), w) == (ba || bb));
    REQUIRE(accepts(difference(a, b), w) == (ba && !bb));
    REQUIRE(accepts(complement(a), w) == !ba);
  }
}

TEST_CASE("equivalence and emptiness") {
  Fsa a = contains_01();
  REQUIRE(equivalent(a, a));
  REQUIRE(!equivalent(a, even_ones()));
  REQUIRE(is_empty(difference(a, a)));
  REQUIRE(is_empty(Fsa::reject_all(2)));
  REQUIRE(!is_empty(Fsa::sigma_star(2)));
  REQUIRE(equivalent(minimize(a), a));
}

TEST_CASE("minimization is canonical across presentations") {
  Fsa a = contains_01();
  Fsa also_a = intersect(unite(a, a), Fsa::sigma_star(2));
  Fsa m1 = minimize(a), m2 = minimize(also_a);
  REQUIRE(m1.num_states == m2.num_states);
  REQUIRE(m1.trans == m2.trans);
  REQUIRE(m1.accepting == m2.accepting);
  REQUIRE(m1.start == m2.start);
}

TEST_CASE("shortest accepted word is found") {
  Fsa a = contains_01();
  auto w = shortest_accepted(a);
  REQUIRE(w.has_value());
  REQUIRE(*w == Word({0, 1}));
  REQUIRE(!shortest_accepted(Fsa::reject_all(2)).has_value());
}

TEST_CASE("concat star and union match brute force") {
  Fsa a = Fsa::single_word(2, Word{0});
  Fsa b = contains_01();
  Fsa cc = concat(a, b);
  Fsa st = star(Fsa::single_word(2, Word{0, 1}));
  for (const Word& w : all_words(2, 8)) {
    bool expect_cc = !w.empty() && w[0] == 0 && brute_contains_01(suffix_from(w, 1));
    bool expect_st = w.size() % 2 == 0;
    if (expect_st)
      for (size_t i = 0; i < w.size(); i += 2) expect_st = expect_st && w[i] == 0 && w[i + 1] == 1;
    CAPTURE(w);
    REQUIRE(accepts(cc, w) == expect_cc);
    REQUIRE(accepts(st, w) == expect_st);
  }
}

TEST_CASE("quotient by a word") {
  // L = {0,1}* 01 ; L / 1 = words u with u1 in L
  Fsa l = concat(Fsa::sigma_star(2), Fsa::single_word(2, Word{0, 1}));
  Fsa q = quotient_by_word(l, Word{1});
  for (const Word& w : all_words(2, 7)) {
    Word w1 = w;
    w1.push_back(1);
    CAPTURE(w);
    REQUIRE(accepts(q, w) == accepts(l, w1));
  }
}

TEST_CASE("homomorphic image via substitution") {
  // h: 0 -> 00, 1 -> eps over a one-letter target? use 2 symbols: h(0)=00, h(1)=1
  Fsa l = even_ones();
  Fsa img = hom_image(l, 2, {Word{0, 0}, Word{1}});
  // image language: {h(w) : even ones} ; brute force via enumeration of sources
  std::set<Word> expect;
  for (const Word& w : all_words(2, 6)) {
    if (!brute_even_ones(w)) continue;
    Word h;
    for (int x : w) {
      if (x == 0) {
        h.push_back(0);
        h.push_back(0);
      } else {
        h.push_back(1);
      }
    }
    if (h.size() <= 6) expect.insert(h);
  }
  for (const Word& w : all_words(2, 6)) {
    CAPTURE(w);
    REQUIRE(accepts(img, w) == (expect.count(w) > 0));
  }
}

TEST_CASE("erasing homomorphic image") {
  // erase letter 1 from words with an even number of 1s: image = 0*
  Fsa img = hom_image(even_ones(), 2, {Word{0}, Word{}});
  for (const Word& w : all_words(2, 6)) {
    bool only0 = true;
    for (int x : w) only0 = only0 && x == 0;
    CAPTURE(w);
    REQUIRE(accepts(img, w) == only0);
  }
}

TEST_CASE("homomorphic preimage") {
  Fsa l = contains_01();
  Fsa pre = hom_preimage(l, 2, {Word{0, 1}, Word{}});
  for (const Word& w : all_words(2, 7)) {
    Word h;
    for (int x : w)
      if (x == 0) {
        h.push_back(0);
        h.push_back(1);
      }
    CAPTURE(w);
    REQUIRE(accepts(pre, w) == brute_contains_01(h));
  }
}

TEST_CASE("symbol remapping embeds into a larger alphabet") {
  Fsa l = contains_01();
  Fsa r = remap_symbols(l, 4, {2, 3});
  for (const Word& w : all_words(2, 6)) {
    Word m;
    for (int x : w) m.push_back(x + 2);
    CAPTURE(w);
    REQUIRE(accepts(r, m) == brute_contains_01(w));
  }
  REQUIRE(!accepts(r, Word{0}));
  REQUIRE(!accepts(r, Word{2, 3, 0}));
}

TEST_CASE("enumeration is shortlex and complete") {
  Fsa l = even_ones();
  auto words = enumerate_upto(l, 5);
  std::set<Word> got(words.begin(), words.end());
  size_t count = 0;
  for (const Word& w : all_words(2, 5)) {
    if (brute_even_ones(w)) {
      ++count;
      REQUIRE(got.count(w) == 1);
    }
  }
  REQUIRE(words.size() == count);
  for (size_t i = 0; i + 1 < words.size(); ++i) REQUIRE(shortlex_less(words[i], words[i + 1]));
}

TEST_CASE("prefix closedness") {
  REQUIRE(is_prefix_closed(Fsa::sigma_star(2)));
  REQUIRE(is_prefix_closed(Fsa::epsilon_only(2)));
  REQUIRE(!is_prefix_closed(contains_01()));
  REQUIRE(is_prefix_closed(star(Fsa::words_over(2, {0}))));
}

TEST_CASE("dot export names states and edges") {
  std::string dot = export_dot(even_ones(), {"x", "y"});
  REQUIRE(dot.find("digraph") != std::string::npos);
  REQUIRE(dot.find("x") != std::string::npos);
}
