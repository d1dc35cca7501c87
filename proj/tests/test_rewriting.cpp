#include <catch2/catch_amalgamated.hpp>

#include "autostack/rewriting.hpp"
#include "autostack/words.hpp"

using namespace autostack;

namespace {

RewritingSystem klein_rules() {
  RewritingSystem rs;
  rs.alphabet = Alphabet::with_inverses({"a", "b"});
  const Alphabet& al = rs.alphabet;
  auto r = [&](const char* l, const char* rr) {
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
  return rs;
}

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

}  // namespace

TEST_CASE("redex search is leftmost with declaration-order ties") {
  RewritingSystem rs = klein_rules();
  const Alphabet& al = rs.alphabet;
  Word w = parse_word(al, "b a a^-1");
  auto m = find_redex(rs, w);
  REQUIRE(m.has_value());
  REQUIRE(m->first == 0);  // "b a" at 0 beats "a a^-1" at 1
  REQUIRE(m->second == 4);
  Word w2 = parse_word(al, "a a^-1 b");
  auto m2 = find_redex(rs, w2);
  REQUIRE(m2->first == 0);
  REQUIRE(m2->second == 0);
  REQUIRE(!find_redex(rs, parse_word(al, "a a b")).has_value());
}

TEST_CASE("rewriting reaches the known normal form") {
  RewritingSystem rs = klein_rules();
  const Alphabet& al = rs.alphabet;
  // b a b^-1 = a^-1 in the presented group
  Word w = rewrite_to_irreducible(rs, parse_word(al, "b a b^-1"));
  REQUIRE(w == parse_word(al, "a^-1"));
  REQUIRE(rewrite_to_irreducible(rs, parse_word(al, "b a b a")).empty() == false);
  REQUIRE(is_irreducible(rs, w));
  REQUIRE(!is_irreducible(rs, parse_word(al, "b a")));
}

TEST_CASE("nonterminating rewriting hits the step cap") {
  RewritingSystem rs;
  rs.alphabet = Alphabet::with_inverses({"a"});
  rs.rules.push_back({parse_word(rs.alphabet, "a"), parse_word(rs.alphabet, "a^-1 a a")});
  REQUIRE_THROWS_AS(rewrite_to_irreducible(rs, parse_word(rs.alphabet, "a"), 500), Error);
}

TEST_CASE("critical pairs of a confluent system all join") {
  REQUIRE(unjoinable_critical_pairs(klein_rules()).empty());
}

TEST_CASE("non-confluent overlaps are reported") {
  RewritingSystem rs;
  rs.alphabet = Alphabet::with_inverses({"a", "b"});
  const Alphabet& al = rs.alphabet;
  // a a -> a resolves the overlap a a a two ways only if joined; make a clash:
  rs.rules.push_back({parse_word(al, "a a"), parse_word(al, "b")});
  rs.rules.push_back({parse_word(al, "a a a"), parse_word(al, "")});
  auto bad = unjoinable_critical_pairs(rs);
  REQUIRE(!bad.empty());
}

TEST_CASE("irreducible word language matches a direct scan") {
  RewritingSystem rs = klein_rules();
  Fsa nf = irreducible_words_fsa(rs);
  for (const Word& w : all_words(rs.alphabet.size(), 5)) {
    CAPTURE(w);
    REQUIRE(accepts(nf, w) == is_irreducible(rs, w));
  }
}

TEST_CASE("suffix rule values use the shortest matching suffix") {
  RewritingSystem rs = klein_rules();
  const Alphabet& al = rs.alphabet;
  // phi(b, a) = b^-1 . (a^-1 b)
  REQUIRE(suffix_rule_value(rs, parse_word(al, "b"), al.id("a")) ==
          parse_word(al, "b^-1 a^-1 b"));
  REQUIRE(suffix_rule_value(rs, parse_word(al, "a a b"), al.id("a")) ==
          parse_word(al, "b^-1 a^-1 b"));
  REQUIRE_THROWS_AS(suffix_rule_value(rs, parse_word(al, "a"), al.id("a")), Error);
}

TEST_CASE("empty left-hand sides are rejected") {
  RewritingSystem rs;
  rs.alphabet = Alphabet::with_inverses({"a"});
  rs.rules.push_back({Word{}, parse_word(rs.alphabet, "a")});
  REQUIRE_THROWS_AS(rs.validate(), Error);
}
