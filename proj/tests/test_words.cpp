#include <catch2/catch_amalgamated.hpp>

#include "autostack/words.hpp"

using namespace autostack;

TEST_CASE("alphabet pairing and lookup") {
  Alphabet a = Alphabet::with_inverses({"a", "b"});
  REQUIRE(a.size() == 4);
  REQUIRE(a.name(0) == "a");
  REQUIRE(a.name(1) == "a^-1");
  REQUIRE(a.inverse(0) == 1);
  REQUIRE(a.inverse(1) == 0);
  REQUIRE(a.id("b^-1") == 3);
  REQUIRE(a.has("b"));
  REQUIRE(!a.has("c"));
  REQUIRE_THROWS_AS(a.id("c"), Error);
}

TEST_CASE("self-inverse letters") {
  Alphabet a = Alphabet::from_pairs({{"a", "a^-1"}, {"b", "b"}});
  REQUIRE(a.size() == 3);
  REQUIRE(a.inverse(2) == 2);
  Word w = parse_word(a, "b b");
  REQUIRE(free_reduce(a, w).empty());
}

TEST_CASE("duplicate names rejected") {
  REQUIRE_THROWS_AS(Alphabet::from_pairs({{"a", "b"}, {"b", "c"}}), Error);
}

TEST_CASE("free reduction cancels nested pairs") {
  Alphabet a = Alphabet::with_inverses({"x", "y"});
  Word w = parse_word(a, "x y y^-1 x^-1 x");
  REQUIRE(free_reduce(a, w) == parse_word(a, "x"));
  REQUIRE(is_freely_reduced(a, parse_word(a, "x y")));
  REQUIRE(!is_freely_reduced(a, w));
  REQUIRE(free_reduce(a, Word{}).empty());
}

TEST_CASE("inversion reverses and flips") {
  Alphabet a = Alphabet::with_inverses({"x", "y"});
  Word w = parse_word(a, "x y^-1 y x");
  REQUIRE(invert(a, w) == parse_word(a, "x^-1 y^-1 y x^-1"));
  REQUIRE(free_reduce(a, cat(w, invert(a, w))).empty());
}

TEST_CASE("word formatting round-trips") {
  Alphabet a = Alphabet::with_inverses({"a", "b"});
  Word w = parse_word(a, "a b^-1 a^-1");
  REQUIRE(parse_word(a, format_word(a, w)) == w);
  REQUIRE(format_word(a, Word{}).empty());
}

TEST_CASE("shortlex ordering") {
  Word u{0, 1}, v{1}, t{0, 2};
  REQUIRE(shortlex_less(v, u));
  REQUIRE(shortlex_less(u, t));
  REQUIRE(!shortlex_less(u, u));
}

TEST_CASE("prefix and suffix helpers") {
  Word w{0, 1, 2};
  REQUIRE(prefix(w, 2) == Word({0, 1}));
  REQUIRE(suffix_from(w, 1) == Word({1, 2}));
  REQUIRE_THROWS_AS(prefix(w, 4), Error);
}

TEST_CASE("merging alphabets keeps ids per part") {
  Alphabet a = Alphabet::with_inverses({"a"});
  Alphabet b = Alphabet::with_inverses({"b", "c"});
  MergedAlphabet m = merge_alphabets({&a, &b});
  REQUIRE(m.merged.size() == 6);
  REQUIRE(m.maps[0][0] == m.merged.id("a"));
  REQUIRE(m.maps[1][2] == m.merged.id("c"));
  Word w = map_word(m.maps[1], parse_word(b, "c b^-1"));
  REQUIRE(format_word(m.merged, w) == "c b^-1");
  Alphabet clash = Alphabet::with_inverses({"a"});
  REQUIRE_THROWS_AS(merge_alphabets({&a, &clash}), Error);
}

TEST_CASE("tagging renames letters consistently") {
  Alphabet a = Alphabet::with_inverses({"x"});
  Alphabet t = tagged(a, "v0.");
  REQUIRE(t.name(0) == "v0.x");
  REQUIRE(t.inverse(t.id("v0.x")) == t.id("v0.x^-1"));
}
