#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <vector>

#include "autostack/gog.hpp"
#include "autostack/verify.hpp"
#include "autostack/zoo.hpp"

using namespace autostack;

namespace {

template <typename Fn>
std::string thrown_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code;
  }
  return "";
}

// Z * Z over the trivial subgroup: should come out as the free group F(a, b).
GraphOfGroupsSpec free_product_spec() {
  GraphOfGroupsSpec spec;
  spec.num_vertices = 2;
  spec.basepoint = 0;
  auto za = zoo::make_free_abelian({"a"});
  auto zb = zoo::make_free_abelian({"b"});
  spec.base = za;
  GogEdge e;
  e.from = 0;
  e.to = 1;
  e.in_tree = true;
  e.fwd.letter = "e";
  e.fwd.structure = respecting_trivial(zb);
  e.rev.letter = "e^-1";
  e.rev.structure = respecting_trivial(za);
  spec.edges.push_back(e);
  return spec;
}

// HNN extension of Z = <a> with stable letter b acting by inversion, which is
// the Klein bottle group.
GraphOfGroupsSpec klein_spec() {
  GraphOfGroupsSpec spec;
  spec.num_vertices = 1;
  spec.basepoint = 0;
  auto z = zoo::make_free_abelian({"a"});
  spec.base = z;
  auto whole = split_respecting(z, {"a"}, Fsa::epsilon_only(z.alphabet.size()));
  GogEdge e;
  e.from = 0;
  e.to = 0;
  e.in_tree = false;
  e.fwd.letter = "b";
  e.fwd.structure = whole;
  e.fwd.transport = {{"a", "a^-1"}, {"a^-1", "a"}};
  e.rev.letter = "b^-1";
  e.rev.structure = whole;
  e.rev.transport = {{"a", "a^-1"}, {"a^-1", "a"}};
  spec.edges.push_back(e);
  return spec;
}

// Torus knot group <x, y | x^p = y^q> as Z amalgamated with Z over the
// subgroups generated by X = x^p and Y = y^q.
GraphOfGroupsSpec torus_knot_spec(int p, int q) {
  GraphOfGroupsSpec spec;
  spec.num_vertices = 2;
  spec.basepoint = 0;
  auto rx = zoo::make_z_respecting_mz(p, "x", "X");
  auto ry = zoo::make_z_respecting_mz(q, "y", "Y");
  spec.base = rx.base;
  GogEdge e;
  e.from = 0;
  e.to = 1;
  e.in_tree = true;
  e.fwd.letter = "e";
  e.fwd.structure = ry;
  e.fwd.transport = {{"Y", "X"}, {"Y^-1", "X^-1"}};
  e.rev.letter = "e^-1";
  e.rev.structure = rx;
  e.rev.transport = {{"X", "Y"}, {"X^-1", "Y^-1"}};
  spec.edges.push_back(e);
  return spec;
}

std::vector<Word> all_words_upto(int nsym, int max_len) {
  std::vector<Word> out{{}};
  size_t lo = 0;
  for (int len = 1; len <= max_len; ++len) {
    size_t hi = out.size();
    for (size_t i = lo; i < hi; ++i)
      for (LetterId x = 0; x < nsym; ++x) {
        Word w = out[i];
        w.push_back(x);
        out.push_back(w);
      }
    lo = hi;
  }
  return out;
}

}  // namespace

TEST_CASE("free product of two copies of Z") {
  GogOptions opts;
  opts.compile_graph = true;
  auto s = gog_compose(free_product_spec(), opts);
  auto f2 = zoo::make_free_group({"a", "b"});

  REQUIRE(s.alphabet == f2.alphabet);
  REQUIRE(equivalent(s.nf, f2.nf));
  REQUIRE(s.stacking.combinator == "gog");
  REQUIRE(s.stacking.image_fn);

  SECTION("solving is free reduction") {
    for (const Word& w : all_words_upto(s.alphabet.size(), 4))
      REQUIRE(normal_form(s, w) == free_reduce(s.alphabet, w));
  }
  SECTION("axioms against the free group oracle, graph cross-checked") {
    auto rep = verify_structure(s, free_group_oracle(s.alphabet));
    INFO(rep.summary());
    REQUIRE(rep.ok());
    REQUIRE(rep.checks.size() == 5);
  }
}

TEST_CASE("Klein bottle group as an HNN extension of Z") {
  GogOptions opts;
  opts.compile_graph = true;
  auto s = gog_compose(klein_spec(), opts);
  auto k = zoo::make_klein_bottle();

  REQUIRE(s.alphabet == k.alphabet);
  REQUIRE(equivalent(s.nf, k.nf));

  SECTION("defining relation and spot checks") {
    REQUIRE(normal_form(s, parse_word(s.alphabet, "b a b^-1 a")).empty());
    REQUIRE(normal_form(s, parse_word(s.alphabet, "b a b^-1")) ==
            parse_word(s.alphabet, "a^-1"));
    REQUIRE(normal_form(s, parse_word(s.alphabet, "b a")) == parse_word(s.alphabet, "a^-1 b"));
    for (const Word& w : all_words_upto(s.alphabet.size(), 4))
      REQUIRE(normal_form(s, w) == normal_form(k, w));
  }
  SECTION("axioms against the affine oracle, graph cross-checked") {
    auto rep = verify_structure(s, zoo::klein_bottle_oracle());
    INFO(rep.summary());
    REQUIRE(rep.ok());
    REQUIRE(rep.checks.size() == 5);
  }
}

TEST_CASE("trefoil knot group as an amalgam of two copies of Z") {
  auto spec = torus_knot_spec(2, 3);
  auto s = gog_compose(spec);
  auto oracle = torus_knot_oracle(s.alphabet, 2, 3, "x", "y", "X", "Y");

  REQUIRE(s.alphabet.size() == 8);
  REQUIRE(s.bound == 7);

  SECTION("relators collapse and non-relators do not") {
    auto triv = [&](const std::string& w) {
      return normal_form(s, parse_word(s.alphabet, w)).empty();
    };
    REQUIRE(triv("X Y^-1"));
    REQUIRE(triv("x x X^-1"));
    REQUIRE(triv("y y y Y^-1"));
    REQUIRE(triv("x x y^-1 y^-1 y^-1"));
    REQUIRE(triv("y y y x^-1 x^-1"));
    REQUIRE_FALSE(triv("x y"));
    REQUIRE_FALSE(triv("X y"));
    REQUIRE_FALSE(triv("x x y^-1 y^-1"));
  }
  SECTION("solver agrees with the oracle") {
    for (const Word& w : all_words_upto(s.alphabet.size(), 3)) {
      Word r = normal_form(s, w);
      REQUIRE(accepts(s.nf, r));
      REQUIRE(oracle.eval(r) == oracle.eval(w));
    }
  }
  SECTION("flow axioms") {
    VerifyOptions vo;
    vo.nf_length = 6;  // inverse letters expand, nf(x^-1 y^-1) = X^-2 x y y
    auto rep = verify_structure(s, oracle, vo);
    INFO(rep.summary());
    REQUIRE(rep.ok());
  }
  SECTION("compiled graph contains the evaluated flow") {
    GogOptions opts;
    opts.compile_graph = true;
    auto sg = gog_compose(spec, opts);
    REQUIRE(sg.graph_phi);
    for (const Word& y : enumerate_upto(sg.nf, 3))
      for (LetterId a = 0; a < sg.alphabet.size(); ++a)
        REQUIRE(graph_phi_membership(sg, y, a, phi_eval(sg, y, a)));
  }
}

TEST_CASE("torus knot group with exponents 2 and 5") {
  auto s = gog_compose(torus_knot_spec(2, 5));
  auto oracle = torus_knot_oracle(s.alphabet, 2, 5, "x", "y", "X", "Y");

  auto triv = [&](const std::string& w) {
    return normal_form(s, parse_word(s.alphabet, w)).empty();
  };
  REQUIRE(triv("X Y^-1"));
  REQUIRE(triv("x x X^-1"));
  REQUIRE(triv("y y y y y Y^-1"));
  REQUIRE(triv("x x y^-1 y^-1 y^-1 y^-1 y^-1"));
  REQUIRE_FALSE(triv("x x y^-1 y^-1 y^-1 y^-1"));

  VerifyOptions vo;
  vo.radius = 2;
  vo.nf_length = 8;  // nf(y^-1 x^-1) = X^-2 y^4 x already has length 7
  auto rep = verify_structure(s, oracle, vo);
  INFO(rep.summary());
  REQUIRE(rep.ok());
}

TEST_CASE("single vertex and no edges reduces to the vertex group") {
  GraphOfGroupsSpec spec;
  spec.base = zoo::make_free_abelian({"a", "b"});
  GogOptions opts;
  opts.compile_graph = true;
  auto s = gog_compose(spec, opts);

  REQUIRE(s.alphabet == spec.base.alphabet);
  REQUIRE(equivalent(s.nf, spec.base.nf));
  REQUIRE(s.bound == 2 + spec.base.bound);
  REQUIRE(equivalent(*s.graph_phi, compile_state_table_graph(spec.base)));
  for (const Word& y : enumerate_upto(s.nf, 3))
    for (LetterId a = 0; a < s.alphabet.size(); ++a)
      REQUIRE(phi_eval(s, y, a) == phi_eval(spec.base, y, a));
}

TEST_CASE("lifting words into tree coordinates") {
  auto ctx = build_gog_context(torus_knot_spec(2, 3));
  LetterId e = ctx->big.id("e"), ei = ctx->big.id("e^-1");
  LetterId x = ctx->big.id("x"), y = ctx->big.id("y"), X = ctx->big.id("X");

  SECTION("tree routes") {
    REQUIRE(ctx->tree_route[0][1] == Word{e});
    REQUIRE(ctx->tree_route[1][0] == Word{ei});
    REQUIRE(ctx->tree_route[0][0].empty());
  }
  SECTION("walk bookkeeping") {
    REQUIRE(last_edge(*ctx, {}, x) == -1);
    REQUIRE(last_edge(*ctx, {}, y) == e);
    REQUIRE(last_edge(*ctx, {y}, x) == ei);
    REQUIRE(last_edge(*ctx, {y, x}, x) == ei);
    REQUIRE(word_target(*ctx, {}) == 0);
    REQUIRE(word_target(*ctx, {y}) == 1);
    REQUIRE(vertex_suffix(*ctx, {y, x}, 0) == Word{x});
    REQUIRE(vertex_suffix(*ctx, {y, x}, 1).empty());
    REQUIRE(vertex_suffix(*ctx, {X, x}, 0) == Word{X, x});
  }
  SECTION("inflate and deflate are mutually inverse on normal forms") {
    for (const Word& w : enumerate_upto(ctx->nf, 6)) {
      Word lifted = inflate(*ctx, w);
      REQUIRE(accepts(ctx->lifted_nf, lifted));
      REQUIRE(deflate(*ctx, lifted) == w);
    }
    for (const Word& lifted : enumerate_upto(ctx->lifted_nf, 6)) {
      Word flat = deflate(*ctx, lifted);
      REQUIRE(accepts(ctx->nf, flat));
      REQUIRE(inflate(*ctx, flat) == lifted);
    }
  }
  SECTION("trailing tree letters strip off") {
    REQUIRE(strip_trailing_tree(*ctx, {x, e}) == Word{x});
    REQUIRE(edge_letters_only(*ctx, {x, e, y, ei}) == Word{e, ei});
  }
}

TEST_CASE("malformed specs are rejected") {
  SECTION("basepoint out of range") {
    auto spec = free_product_spec();
    spec.basepoint = 5;
    REQUIRE(thrown_code([&] { gog_compose(spec); }) == "SpecInvariantViolation");
  }
  SECTION("wrong spanning tree size") {
    auto spec = free_product_spec();
    spec.edges[0].in_tree = false;
    REQUIRE(thrown_code([&] { gog_compose(spec); }) == "SpecInvariantViolation");
  }
  SECTION("vertex structures disagree on the alphabet") {
    auto spec = free_product_spec();
    spec.edges[0].rev.structure = respecting_trivial(zoo::make_free_abelian({"c"}));
    REQUIRE(thrown_code([&] { gog_compose(spec); }) == "SpecInvariantViolation");
  }
  SECTION("edge letter reuses a vertex letter name") {
    auto spec = klein_spec();
    spec.edges[0].fwd.letter = "a";
    REQUIRE(thrown_code([&] { gog_compose(spec); }) == "SpecInvariantViolation");
  }
  SECTION("transport misses a subgroup letter") {
    auto spec = torus_knot_spec(2, 3);
    spec.edges[0].fwd.transport = {{"Y", "X"}};
    REQUIRE(thrown_code([&] { gog_compose(spec); }) == "SpecInvariantViolation");
  }
  SECTION("transport value outside the opposite subgroup") {
    auto spec = torus_knot_spec(2, 3);
    spec.edges[0].fwd.transport = {{"Y", "x"}, {"Y^-1", "x^-1"}};
    REQUIRE(thrown_code([&] { gog_compose(spec); }) == "SpecInvariantViolation");
  }
  SECTION("transports that are not mutually inverse") {
    auto spec = torus_knot_spec(2, 3);
    spec.edges[0].fwd.transport = {{"Y", "X^-1"}, {"Y^-1", "X"}};
    REQUIRE(thrown_code([&] { gog_compose(spec); }) == "SpecInvariantViolation");
  }
  SECTION("transversal containing a subgroup letter") {
    auto spec = klein_spec();
    auto z = zoo::make_free_abelian({"a"});
    RespectingStructure bad;
    bad.base = z;
    bad.subgroup_letters = {0, 1};
    bad.nf_h = Fsa::epsilon_only(z.alphabet.size());
    bad.nf_tr = z.nf;
    spec.edges[0].fwd.structure = bad;
    spec.edges[0].rev.structure = bad;
    REQUIRE(thrown_code([&] { gog_compose(spec); }) == "SpecInvariantViolation");
  }
  SECTION("graph compilation needs graphs at the vertices") {
    auto inner = gog_compose(free_product_spec());
    GraphOfGroupsSpec outer;
    outer.base = inner;
    GogOptions opts;
    opts.compile_graph = true;
    REQUIRE(thrown_code([&] { gog_compose(outer, opts); }) == "GraphNotCompilable");
  }
}

TEST_CASE("composites nest") {
  GogOptions opts;
  opts.compile_graph = true;
  auto inner = gog_compose(free_product_spec(), opts);
  GraphOfGroupsSpec outer_spec;
  outer_spec.base = inner;
  auto outer = gog_compose(outer_spec, opts);

  REQUIRE(equivalent(outer.nf, inner.nf));
  REQUIRE(equivalent(*outer.graph_phi, *inner.graph_phi));
  for (const Word& w : all_words_upto(outer.alphabet.size(), 3))
    REQUIRE(normal_form(outer, w) == normal_form(inner, w));
}

TEST_CASE("specs round trip through json") {
  auto spec = torus_knot_spec(2, 3);
  json j = gog_spec_to_json(spec);
  auto spec2 = gog_spec_from_json(j);
  auto s = gog_compose(spec);
  auto s2 = gog_compose(spec2);

  REQUIRE(s2.alphabet == s.alphabet);
  REQUIRE(equivalent(s2.nf, s.nf));
  for (const std::string& w : {"x x X^-1", "X Y^-1", "y x y", "x y^-1 x y"}) {
    Word word = parse_word(s.alphabet, w);
    REQUIRE(normal_form(s2, word) == normal_form(s, word));
  }
  REQUIRE(json::parse(s.stacking.recipe_json) == j);

  SECTION("respecting structures round trip on their own") {
    auto r = zoo::make_z_respecting_mz(3, "y", "Y");
    auto r2 = respecting_from_json(respecting_to_json(r));
    REQUIRE(r2.base.alphabet == r.base.alphabet);
    REQUIRE(r2.subgroup_letters == r.subgroup_letters);
    REQUIRE(equivalent(r2.base.nf, r.base.nf));
    REQUIRE(equivalent(r2.nf_h, r.nf_h));
    REQUIRE(equivalent(r2.nf_tr, r.nf_tr));
  }
}
