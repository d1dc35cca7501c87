#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "autostack/oracles.hpp"
#include "autostack/stacking.hpp"
#include "autostack/zoo.hpp"

using namespace autostack;

namespace {

std::vector<Word> all_words(int num_symbols, int max_len) {
  std::vector<Word> out{{}};
  size_t lo = 0;
  for (int len = 1; len <= max_len; ++len) {
    size_t hi = out.size();
    for (size_t i = lo; i < hi; ++i)
      for (int a = 0; a < num_symbols; ++a) {
        Word w = out[i];
        w.push_back(a);
        out.push_back(w);
      }
    lo = hi;
  }
  return out;
}

template <typename Fn>
std::string thrown_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code;
  }
  return "";
}

void check_against_oracle(const AutostackableStructure& s, const ElementOracle& o, int max_len) {
  for (const Word& w : all_words(s.alphabet.size(), max_len)) {
    Word y = normal_form(s, w);
    INFO("input " << format_word(s.alphabet, w));
    REQUIRE(accepts(s.nf, y));
    REQUIRE(o.eval(y) == o.eval(w));
    REQUIRE(normal_form(s, y) == y);
  }
}

}  // namespace

TEST_CASE("free abelian solver matches the vector oracle") {
  auto s = zoo::make_free_abelian({"a", "b"});
  auto o = zoo::free_abelian_oracle({"a", "b"});
  check_against_oracle(s, o, 5);
  REQUIRE(is_trivial(s, parse_word(s.alphabet, "a b a^-1 b^-1")));
  REQUIRE(normal_form(s, parse_word(s.alphabet, "b b a a")) ==
          parse_word(s.alphabet, "a a b b"));
}

TEST_CASE("free group solver keeps the commutator nontrivial") {
  auto s = zoo::make_free_group({"a", "b"});
  auto o = free_group_oracle(s.alphabet);
  check_against_oracle(s, o, 5);
  REQUIRE_FALSE(is_trivial(s, parse_word(s.alphabet, "a b a^-1 b^-1")));
}

TEST_CASE("rewriting-derived solvers match their oracles") {
  SECTION("Z/2 * Z/3") {
    auto s = zoo::make_c2_star_c3();
    auto o = zoo::c2_star_c3_oracle();
    check_against_oracle(s, o, 5);
    REQUIRE(normal_form(s, parse_word(s.alphabet, "b b")) == parse_word(s.alphabet, "b^-1"));
  }
  SECTION("Klein bottle") {
    auto s = zoo::make_klein_bottle();
    auto o = zoo::klein_bottle_oracle();
    check_against_oracle(s, o, 5);
    REQUIRE(normal_form(s, parse_word(s.alphabet, "b a")) == parse_word(s.alphabet, "a^-1 b"));
  }
}

TEST_CASE("index-m subgroup structure solves and splits") {
  auto r = zoo::make_z_respecting_mz(3);
  const auto& s = r.base;
  auto o = zoo::z_respecting_mz_oracle(3);
  check_against_oracle(s, o, 4);
  REQUIRE(normal_form(s, parse_word(s.alphabet, "a a a")) == parse_word(s.alphabet, "X"));
  REQUIRE(normal_form(s, parse_word(s.alphabet, "a^-1")) ==
          parse_word(s.alphabet, "X^-1 a a"));
  REQUIRE(r.subgroup_letters == std::vector<LetterId>{2, 3});
  REQUIRE(accepts(r.nf_h, parse_word(s.alphabet, "X X")));
  REQUIRE(accepts(r.nf_h, parse_word(s.alphabet, "X^-1")));
  REQUIRE_FALSE(accepts(r.nf_h, parse_word(s.alphabet, "a")));
  REQUIRE(accepts(r.nf_tr, parse_word(s.alphabet, "a a")));
  REQUIRE_FALSE(accepts(r.nf_tr, parse_word(s.alphabet, "a a a")));
}

TEST_CASE("stacking values are read off the table") {
  auto s = zoo::make_free_abelian({"a", "b"});
  const Alphabet& al = s.alphabet;
  LetterId a = al.id("a"), b = al.id("b");
  REQUIRE(phi_eval(s, parse_word(al, "a"), b) == Word{b});
  REQUIRE(phi_eval(s, parse_word(al, "b"), a) == parse_word(al, "b^-1 a b"));
  REQUIRE(in_tree(s, parse_word(al, "a"), b));
  REQUIRE_FALSE(in_tree(s, parse_word(al, "b"), a));
  REQUIRE(in_tree(s, parse_word(al, "b"), al.inverse(b)));
}

TEST_CASE("phi_eval rejects bad inputs") {
  auto s = zoo::make_free_abelian({"a", "b"});
  REQUIRE(thrown_code([&] { phi_eval(s, parse_word(s.alphabet, "b a"), 0); }) ==
          "NotANormalForm");
  REQUIRE(thrown_code([&] { phi_eval(s, {}, 99); }) == "UnknownLetter");
  REQUIRE(thrown_code([&] { normal_form(s, Word{99}); }) == "UnknownLetter");
}

TEST_CASE("a fixed non-tree edge is reported as stuck") {
  auto s = zoo::make_free_abelian({"a", "b"});
  LetterId a = s.alphabet.id("a");
  int q = walk(s.nf, parse_word(s.alphabet, "b"));
  s.stacking.table[static_cast<size_t>(q) * s.alphabet.size() + static_cast<size_t>(a)] =
      Word{a};
  REQUIRE(thrown_code([&] { normal_form(s, parse_word(s.alphabet, "b a")); }) ==
          "StuckRewrite");
}

TEST_CASE("composed stackings delegate and enforce the bound") {
  auto inner = zoo::make_free_abelian({"a", "b"});
  AutostackableStructure s;
  s.alphabet = inner.alphabet;
  s.nf = inner.nf;
  s.bound = inner.bound;
  s.stacking.kind = StackingMap::Kind::Composed;
  s.stacking.combinator = "wrapper";
  s.stacking.eval_fn = [inner](const Word& y, LetterId x) { return phi_eval(inner, y, x); };
  for (const Word& w : all_words(s.alphabet.size(), 4))
    REQUIRE(normal_form(s, w) == normal_form(inner, w));
  REQUIRE_FALSE(phi_image_superset(s).has_value());

  s.stacking.eval_fn = [](const Word&, LetterId) { return Word{0, 0, 0, 0}; };
  REQUIRE(thrown_code([&] { phi_eval(s, {}, 0); }) == "BoundViolation");
}

TEST_CASE("step limits stop runaway rewriting") {
  auto s = zoo::make_free_abelian({"a", "b"});
  Word w = parse_word(s.alphabet, "b b a a");
  SolverOptions tight;
  tight.step_limit = 1;
  REQUIRE(thrown_code([&] { normal_form(s, w, tight); }) == "StepLimitExceeded");
  REQUIRE(normal_form(s, w) == parse_word(s.alphabet, "a a b b"));

  ::setenv("AUTOSTACK_STEP_LIMIT", "1", 1);
  REQUIRE(thrown_code([&] { normal_form(s, w); }) == "StepLimitExceeded");
  ::unsetenv("AUTOSTACK_STEP_LIMIT");
  REQUIRE(normal_form(s, w) == parse_word(s.alphabet, "a a b b"));
}

TEST_CASE("default step limit formula") {
  REQUIRE(default_step_limit(0, 5) == 10);
  REQUIRE(default_step_limit(2, 3) == 270);
  REQUIRE(default_step_limit(3, 0) == 40);
  REQUIRE(default_step_limit(100, 10) == 1000000);
}

TEST_CASE("derivation traces replay exactly") {
  auto s = zoo::make_free_abelian({"a", "b"});
  const Alphabet& al = s.alphabet;
  DerivationTrace t = derivation_trace(s, parse_word(al, "b a"));
  REQUIRE(t.result == parse_word(al, "a b"));
  REQUIRE(t.events.size() == 2);
  REQUIRE(t.events[0].kind == RewriteEvent::Kind::Flow);
  REQUIRE(t.events[0].nf_prefix == parse_word(al, "b"));
  REQUIRE(t.events[0].replacement == parse_word(al, "b^-1 a b"));
  REQUIRE(t.events[1].kind == RewriteEvent::Kind::Cancel);
  REQUIRE(replay_trace(al, t) == t.result);

  DerivationTrace bad_pos = t;
  bad_pos.events[0].pos = 0;
  REQUIRE(thrown_code([&] { replay_trace(al, bad_pos); }) == "MalformedWord");

  DerivationTrace bad_result = t;
  bad_result.result.push_back(0);
  REQUIRE(thrown_code([&] { replay_trace(al, bad_result); }) == "MalformedWord");

  DerivationTrace longer = derivation_trace(s, parse_word(al, "b b a b^-1 a^-1"));
  REQUIRE(replay_trace(al, longer) == longer.result);
  REQUIRE(longer.result == normal_form(s, longer.input));
}

TEST_CASE("compiled stacking graph agrees with direct evaluation") {
  auto s = zoo::make_free_abelian({"a", "b"});
  s.graph_phi = compile_state_table_graph(s);
  const Alphabet& al = s.alphabet;
  LetterId a = al.id("a"), b = al.id("b");
  REQUIRE(graph_phi_membership(s, parse_word(al, "b"), a, parse_word(al, "b^-1 a b")));
  REQUIRE_FALSE(graph_phi_membership(s, parse_word(al, "b"), a, Word{a}));
  REQUIRE(graph_phi_membership(s, parse_word(al, "a"), b, Word{b}));

  CrossCheckResult res = graph_phi_cross_check(s, 3);
  REQUIRE(res.ok);
  REQUIRE(res.issues.empty());
  REQUIRE(res.checked > 0);
}

TEST_CASE("image superset covers every evaluated value") {
  auto s = zoo::make_free_abelian({"a", "b"});
  auto sup = phi_image_superset(s);
  REQUIRE(sup.has_value());
  std::set<Word> pool(sup->begin(), sup->end());
  for (const Word& y : enumerate_upto(s.nf, 3))
    for (int x = 0; x < s.alphabet.size(); ++x) REQUIRE(pool.count(phi_eval(s, y, x)) == 1);

  auto k = zoo::make_klein_bottle();
  auto ksup = phi_image_superset(k);
  REQUIRE(ksup.has_value());
  std::set<Word> kpool(ksup->begin(), ksup->end());
  for (const Word& y : enumerate_upto(k.nf, 3))
    for (int x = 0; x < k.alphabet.size(); ++x) REQUIRE(kpool.count(phi_eval(k, y, x)) == 1);
}
