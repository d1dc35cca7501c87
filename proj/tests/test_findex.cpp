#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>

#include "autostack/findex.hpp"
#include "autostack/oracles.hpp"
#include "autostack/verify.hpp"
#include "autostack/zoo.hpp"

using namespace autostack;

namespace {

std::string thrown_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code;
  }
  return "";
}

// Z = <a> with the doubled generator X = a^2 as the subgroup, index 2
FiniteIndexSpec z2x_spec() {
  FiniteIndexSpec spec;
  spec.subgroup = zoo::make_free_abelian({"X"});
  spec.full_alphabet = Alphabet::from_pairs({{"X", "X^-1"}, {"a", "a^-1"}});
  spec.transversal = {"", "a"};
  spec.action = {
      {0, "X", "X", 0},   {0, "X^-1", "X^-1", 0}, {0, "a", "", 1}, {0, "a^-1", "X^-1", 1},
      {1, "X", "X", 1},   {1, "X^-1", "X^-1", 1}, {1, "a", "X", 0}, {1, "a^-1", "", 0},
  };
  return spec;
}

ElementOracle z2x_oracle(const Alphabet& a) {
  return affine_oracle(a, {{1}}, 0, {{"X", {{2}, 0}}, {"a", {{1}, 0}}});
}

// same subgroup at index 3, X = a^3, so the transversal has a length-2 word
FiniteIndexSpec z3x_spec() {
  FiniteIndexSpec spec;
  spec.subgroup = zoo::make_free_abelian({"X"});
  spec.full_alphabet = Alphabet::from_pairs({{"X", "X^-1"}, {"a", "a^-1"}});
  spec.transversal = {"", "a", "a a"};
  spec.action = {
      {0, "X", "X", 0}, {0, "X^-1", "X^-1", 0}, {0, "a", "", 1},  {0, "a^-1", "X^-1", 2},
      {1, "X", "X", 1}, {1, "X^-1", "X^-1", 1}, {1, "a", "", 2},  {1, "a^-1", "", 0},
      {2, "X", "X", 2}, {2, "X^-1", "X^-1", 2}, {2, "a", "X", 0}, {2, "a^-1", "", 1},
  };
  return spec;
}

ElementOracle z3x_oracle(const Alphabet& a) {
  return affine_oracle(a, {{1}}, 0, {{"X", {{3}, 0}}, {"a", {{1}, 0}}});
}

// infinite dihedral <a, b | b^2, (ba)^2> over the translation subgroup <a>
FiniteIndexSpec dinfty_spec() {
  FiniteIndexSpec spec;
  spec.subgroup = zoo::make_free_abelian({"a"});
  spec.full_alphabet = Alphabet::from_pairs({{"a", "a^-1"}, {"b", "b^-1"}});
  spec.transversal = {"", "b"};
  spec.action = {
      {0, "a", "a", 0},    {0, "a^-1", "a^-1", 0}, {0, "b", "", 1}, {0, "b^-1", "", 1},
      {1, "a", "a^-1", 1}, {1, "a^-1", "a", 1},    {1, "b", "", 0}, {1, "b^-1", "", 0},
  };
  return spec;
}

ElementOracle dinfty_oracle(const Alphabet& a) {
  return affine_oracle(a, {{-1}}, 2, {{"a", {{1}, 0}}, {"b", {{0}, 1}}});
}

Word random_word(std::mt19937& rng, int nsym, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> sym(0, nsym - 1);
  Word w(static_cast<size_t>(len(rng)));
  for (LetterId& x : w) x = sym(rng);
  return w;
}

}  // namespace

TEST_CASE("index one transversals return the subgroup structure respecting itself") {
  FiniteIndexSpec spec;
  spec.subgroup = zoo::make_free_abelian({"a", "b"});
  spec.full_alphabet = Alphabet::from_pairs(spec.subgroup.alphabet.pairs());
  spec.transversal = {""};
  for (int x = 0; x < spec.full_alphabet.size(); ++x)
    spec.action.push_back({0, spec.full_alphabet.name(x), spec.full_alphabet.name(x), 0});

  RespectingStructure g = finite_index_compose(spec);
  CHECK(g.base.stacking.kind == StackingMap::Kind::Composed);
  CHECK(g.base.stacking.combinator == "finite_index");
  CHECK(g.base.bound == spec.subgroup.bound);
  CHECK(equivalent(g.base.nf, spec.subgroup.nf));
  CHECK(equivalent(g.nf_h, spec.subgroup.nf));
  CHECK(equivalent(g.nf_tr, Fsa::epsilon_only(4)));
  CHECK(g.subgroup_letters == std::vector<LetterId>{0, 1, 2, 3});
  for (const Word& y : enumerate_upto(g.base.nf, 3))
    for (int a = 0; a < 4; ++a)
      CHECK(phi_eval(g.base, y, a) == phi_eval(spec.subgroup, y, a));
}

TEST_CASE("doubled generators split the integers at index two") {
  RespectingStructure g = finite_index_compose(z2x_spec());
  const Alphabet& al = g.base.alphabet;

  CHECK(al.size() == 4);
  CHECK(al.name(0) == "X");
  CHECK(al.name(2) == "a");
  CHECK(g.base.bound == 3);
  CHECK(g.subgroup_letters == std::vector<LetterId>{0, 1});

  CHECK(accepts(g.base.nf, parse_word(al, "X X a")));
  CHECK(accepts(g.base.nf, parse_word(al, "X^-1")));
  CHECK(accepts(g.base.nf, parse_word(al, "a")));
  CHECK(!accepts(g.base.nf, parse_word(al, "a X")));
  CHECK(!accepts(g.base.nf, parse_word(al, "a a")));
  CHECK(!accepts(g.base.nf, parse_word(al, "X a a")));
  CHECK(accepts(g.nf_h, parse_word(al, "X X")));
  CHECK(!accepts(g.nf_h, parse_word(al, "a")));
  CHECK(accepts(g.nf_tr, parse_word(al, "a")));
  CHECK(!accepts(g.nf_tr, parse_word(al, "a a")));

  CHECK(phi_eval(g.base, parse_word(al, "X a"), al.id("a")) == parse_word(al, "a^-1 X"));
  CHECK(phi_eval(g.base, parse_word(al, "a"), al.id("a")) == parse_word(al, "a^-1 X"));
  CHECK(phi_eval(g.base, parse_word(al, "X"), al.id("a")) == parse_word(al, "a"));

  CHECK(normal_form(g.base, parse_word(al, "a a")) == parse_word(al, "X"));
  CHECK(normal_form(g.base, parse_word(al, "a a a")) == parse_word(al, "X a"));
  CHECK(normal_form(g.base, parse_word(al, "a X^-1")) == parse_word(al, "X^-1 a"));
  CHECK(normal_form(g.base, parse_word(al, "X a a^-1")) == parse_word(al, "X"));
  CHECK(is_trivial(g.base, parse_word(al, "a a X^-1")));

  ElementOracle o = z2x_oracle(al);
  std::mt19937 rng(6180339);
  for (int i = 0; i < 300; ++i) {
    Word w = random_word(rng, al.size(), 16);
    Word nf = normal_form(g.base, w);
    REQUIRE(accepts(g.base.nf, nf));
    REQUIRE(oracle_equal(o, w, nf));
    REQUIRE(normal_form(g.base, nf) == nf);
  }

  VerifyOptions opts;
  opts.radius = 4;
  VerificationReport rep = verify_respecting(g, o, opts);
  INFO(rep.summary());
  CHECK(rep.ok());
}

TEST_CASE("the infinite dihedral group composes over its translation subgroup") {
  RespectingStructure g = finite_index_compose(dinfty_spec());
  const Alphabet& al = g.base.alphabet;

  CHECK(g.base.bound == 3);
  CHECK(g.subgroup_letters == std::vector<LetterId>{0, 1});

  CHECK(accepts(g.base.nf, parse_word(al, "a a b")));
  CHECK(accepts(g.base.nf, parse_word(al, "a^-1 b")));
  CHECK(accepts(g.base.nf, parse_word(al, "b")));
  CHECK(!accepts(g.base.nf, parse_word(al, "b a")));
  CHECK(!accepts(g.base.nf, parse_word(al, "b b")));
  CHECK(!accepts(g.base.nf, parse_word(al, "a b b")));

  CHECK(phi_eval(g.base, parse_word(al, "b"), al.id("a")) == parse_word(al, "b^-1 a^-1 b"));
  CHECK(phi_eval(g.base, parse_word(al, "a b"), al.id("b")) == parse_word(al, "b^-1"));
  CHECK(phi_eval(g.base, parse_word(al, "b"), al.id("b")) == parse_word(al, "b^-1"));

  CHECK(is_trivial(g.base, parse_word(al, "b b")));
  CHECK(is_trivial(g.base, parse_word(al, "b a b a")));
  CHECK(is_trivial(g.base, parse_word(al, "a b a b")));
  CHECK(normal_form(g.base, parse_word(al, "a b a")) == parse_word(al, "b"));
  CHECK(normal_form(g.base, parse_word(al, "b a")) == parse_word(al, "a^-1 b"));

  ElementOracle o = dinfty_oracle(al);
  std::mt19937 rng(9042026);
  for (int i = 0; i < 500; ++i) {
    Word w = random_word(rng, al.size(), 20);
    Word nf = normal_form(g.base, w);
    REQUIRE(accepts(g.base.nf, nf));
    REQUIRE(oracle_equal(o, w, nf));
    REQUIRE(normal_form(g.base, nf) == nf);
  }

  VerifyOptions opts;
  opts.radius = 5;
  VerificationReport rep = verify_respecting(g, o, opts);
  INFO(rep.summary());
  CHECK(rep.ok());
}

TEST_CASE("a longer transversal collects powers at index three") {
  RespectingStructure g = finite_index_compose(z3x_spec());
  const Alphabet& al = g.base.alphabet;

  CHECK(g.base.bound == 5);

  CHECK(normal_form(g.base, parse_word(al, "a a a")) == parse_word(al, "X"));
  CHECK(normal_form(g.base, parse_word(al, "a a a a")) == parse_word(al, "X a"));
  CHECK(normal_form(g.base, parse_word(al, "a^-1")) == parse_word(al, "X^-1 a a"));
  CHECK(phi_eval(g.base, parse_word(al, "a a"), al.id("a")) == parse_word(al, "a^-1 a^-1 X"));
  CHECK(phi_eval(g.base, parse_word(al, "X a a"), al.id("X")) ==
        parse_word(al, "a^-1 a^-1 X a a"));

  ElementOracle o = z3x_oracle(al);
  std::mt19937 rng(2718281);
  for (int i = 0; i < 300; ++i) {
    Word w = random_word(rng, al.size(), 18);
    Word nf = normal_form(g.base, w);
    REQUIRE(accepts(g.base.nf, nf));
    REQUIRE(oracle_equal(o, w, nf));
  }

  VerifyOptions opts;
  opts.radius = 4;
  VerificationReport rep = verify_respecting(g, o, opts);
  INFO(rep.summary());
  CHECK(rep.ok());
}

TEST_CASE("coset tables that do not cohere are rejected") {
  SECTION("a transversal missing a prefix") {
    FiniteIndexSpec spec = dinfty_spec();
    spec.transversal = {"", "b", "a b"};
    CHECK(thrown_code([&] { finite_index_compose(spec); }) == "NonPrefixClosedTransversal");
  }
  SECTION("a first transversal word that is not empty") {
    FiniteIndexSpec spec = dinfty_spec();
    spec.transversal = {"b", ""};
    CHECK(thrown_code([&] { finite_index_compose(spec); }) == "SpecInvariantViolation");
  }
  SECTION("duplicate transversal words") {
    FiniteIndexSpec spec = dinfty_spec();
    spec.transversal = {"", "b", "b"};
    CHECK(thrown_code([&] { finite_index_compose(spec); }) == "SpecInvariantViolation");
  }
  SECTION("an empty transversal list") {
    FiniteIndexSpec spec = dinfty_spec();
    spec.transversal = {};
    CHECK(thrown_code([&] { finite_index_compose(spec); }) == "SpecInvariantViolation");
  }
  SECTION("a missing action entry") {
    FiniteIndexSpec spec = dinfty_spec();
    spec.action.pop_back();
    CHECK(thrown_code([&] { finite_index_compose(spec); }) == "InconsistentCosetTable");
  }
  SECTION("a duplicate action entry") {
    FiniteIndexSpec spec = dinfty_spec();
    spec.action.push_back({0, "a", "a", 0});
    CHECK(thrown_code([&] { finite_index_compose(spec); }) == "SpecInvariantViolation");
  }
  SECTION("a coset index out of range") {
    FiniteIndexSpec spec = dinfty_spec();
    spec.action[0].coset = 5;
    CHECK(thrown_code([&] { finite_index_compose(spec); }) == "SpecInvariantViolation");
  }
  SECTION("an action value outside the subgroup alphabet") {
    FiniteIndexSpec spec = dinfty_spec();
    spec.action[0].value = "b";
    CHECK(thrown_code([&] { finite_index_compose(spec); }) == "UnknownLetter");
  }
  SECTION("an action entry naming an unknown letter") {
    FiniteIndexSpec spec = dinfty_spec();
    spec.action[0].letter = "z";
    CHECK(thrown_code([&] { finite_index_compose(spec); }) == "SpecInvariantViolation");
  }
  SECTION("inverse entries that do not return") {
    FiniteIndexSpec spec = dinfty_spec();
    spec.action[6].target = 1;  // (b, b) should close back onto the trivial coset
    CHECK(thrown_code([&] { finite_index_compose(spec); }) == "InconsistentCosetTable");
  }
  SECTION("inverse entries with mismatched subgroup words") {
    FiniteIndexSpec spec = z2x_spec();
    spec.action[6].value = "X^-1";  // t1 . a really contributes X, not X^-1
    CHECK(thrown_code([&] { finite_index_compose(spec); }) == "InconsistentCosetTable");
  }
  SECTION("a subgroup letter moving the trivial coset") {
    FiniteIndexSpec spec = z2x_spec();
    spec.action[0].value = "X X";
    spec.action[1].value = "X^-1 X^-1";
    CHECK(thrown_code([&] { finite_index_compose(spec); }) == "InconsistentCosetTable");
  }
  SECTION("a transversal word the table does not reach") {
    FiniteIndexSpec spec = z3x_spec();
    spec.action[6].value = "X";     // (a, a): the step onto "a a" must be silent
    spec.action[11].value = "X^-1";
    CHECK(thrown_code([&] { finite_index_compose(spec); }) == "InconsistentCosetTable");
  }
  SECTION("a subgroup alphabet that is not an id prefix") {
    FiniteIndexSpec spec = dinfty_spec();
    spec.full_alphabet = Alphabet::from_pairs({{"b", "b^-1"}, {"a", "a^-1"}});
    CHECK(thrown_code([&] { finite_index_compose(spec); }) == "SpecInvariantViolation");
  }
}

TEST_CASE("finite index specs round trip through json") {
  FiniteIndexSpec spec = dinfty_spec();
  json j = findex_spec_to_json(spec);
  FiniteIndexSpec spec2 = findex_spec_from_json(j);
  RespectingStructure g1 = finite_index_compose(spec);
  RespectingStructure g2 = finite_index_compose(spec2);

  REQUIRE(g1.base.alphabet.size() == g2.base.alphabet.size());
  for (int i = 0; i < g1.base.alphabet.size(); ++i)
    CHECK(g1.base.alphabet.name(i) == g2.base.alphabet.name(i));
  CHECK(g1.base.bound == g2.base.bound);
  CHECK(equivalent(g1.base.nf, g2.base.nf));
  CHECK(equivalent(g1.nf_h, g2.nf_h));
  CHECK(equivalent(g1.nf_tr, g2.nf_tr));
  CHECK(json::parse(g1.base.stacking.recipe_json) == j);
  for (const Word& y : enumerate_upto(g1.base.nf, 3))
    for (int a = 0; a < g1.base.alphabet.size(); ++a)
      CHECK(phi_eval(g1.base, y, a) == phi_eval(g2.base, y, a));

  ElementOracle o = dinfty_oracle(g2.base.alphabet);
  std::mt19937 rng(1729);
  for (int i = 0; i < 100; ++i) {
    Word w = random_word(rng, g2.base.alphabet.size(), 12);
    CHECK(oracle_equal(o, w, normal_form(g2.base, w)));
  }
}
