#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "autostack/errors.hpp"
#include "autostack/fsa.hpp"
#include "autostack/json_io.hpp"
#include "autostack/padded.hpp"
#include "autostack/stacking.hpp"
#include "autostack/words.hpp"

namespace autostack {

// ---------------------------------------------------------------------------
// Graph-of-groups composition.
//
// A spec names finitely many vertex groups joined along edges. Traversing an
// edge in either direction lands in a vertex group that must respect the
// image of the edge group there, so each direction carries a
// RespectingStructure placed at its target vertex, plus a `transport` map
// rewriting every subgroup letter as the normal form of the same edge group
// element on the opposite side. The composite group is generated by all
// vertex letters together with one letter per non-tree edge direction; tree
// edge letters exist only inside lifted words and are erased from composite
// normal forms.
// ---------------------------------------------------------------------------

struct GogArrow {
  std::string letter;
  RespectingStructure structure;  // at the target vertex of this direction
  // subgroup letter name -> word (in the word syntax of the source vertex
  // alphabet) over the opposite structure's subgroup letters
  std::vector<std::pair<std::string, std::string>> transport;
};

struct GogEdge {
  int from = 0;
  int to = 0;
  bool in_tree = true;
  GogArrow fwd;  // traverses from -> to
  GogArrow rev;  // traverses to -> from
};

// Structures attached at one vertex (the basepoint structure and every
// incident arrow's structure) must agree letter-for-letter on their alphabet;
// use extend_generators beforehand when a subgroup needs extra letters.
// Letter names must be globally unique across vertices and edges.
struct GraphOfGroupsSpec {
  int num_vertices = 1;
  int basepoint = 0;
  AutostackableStructure base;  // plain structure at the basepoint
  std::vector<GogEdge> edges;
};

struct GogDirection {
  int edge = 0;
  bool forward = true;
  int from = 0;
  int to = 0;
  bool in_tree = true;
  LetterId letter = -1;          // id in the lifted alphabet
  LetterId reverse_letter = -1;  // id of the opposite direction's letter
  int reverse = 0;               // index of the opposite direction
  std::vector<LetterId> sub;     // subgroup letters at `to`, lifted ids, sorted
  std::map<LetterId, Word> transport;  // lifted subgroup letter -> lifted word
};

struct GogContext {
  int num_vertices = 1;
  int basepoint = 0;
  Alphabet big;    // vertex letters, then non-tree edge pairs, then tree pairs
  Alphabet small;  // id-prefix of big: vertex letters and non-tree edges
  AutostackableStructure base;
  std::vector<GogDirection> dirs;                // two per edge, fwd then rev
  std::vector<RespectingStructure> dir_structure;  // parallel to dirs
  std::vector<int> letter_vertex;  // big id -> vertex, or -1 for edge letters
  std::vector<int> letter_dir;     // big id -> direction index, or -1
  std::vector<int> vertex_offset;  // big id of each vertex's first letter
  std::vector<std::vector<LetterId>> vertex_letters;  // big ids per vertex
  std::vector<std::vector<Word>> tree_route;  // [u][v] tree letters, unique path
  Fsa lifted_nf;  // normal forms over big, tree detours still present
  Fsa nf;         // composite normal forms over small
  int bound = 0;
};

// ---- letter and word geometry ---------------------------------------------

inline int letter_source(const GogContext& c, LetterId x) {
  int d = c.letter_dir.at(static_cast<size_t>(x));
  return d >= 0 ? c.dirs[static_cast<size_t>(d)].from : c.letter_vertex[static_cast<size_t>(x)];
}

inline int letter_target(const GogContext& c, LetterId x) {
  int d = c.letter_dir.at(static_cast<size_t>(x));
  return d >= 0 ? c.dirs[static_cast<size_t>(d)].to : c.letter_vertex[static_cast<size_t>(x)];
}

// End vertex of the path reading w from the basepoint.
inline int word_target(const GogContext& c, const Word& w) {
  return w.empty() ? c.basepoint : letter_target(c, w.back());
}

// Inserts the unique spanning-tree detour wherever consecutive letters do not
// share a vertex, starting from the basepoint. Ids are unchanged otherwise.
inline Word inflate(const GogContext& c, const Word& w) {
  Word out;
  int cur = c.basepoint;
  for (LetterId x : w) {
    const Word& p = c.tree_route[static_cast<size_t>(cur)][static_cast<size_t>(letter_source(c, x))];
    out.insert(out.end(), p.begin(), p.end());
    out.push_back(x);
    cur = letter_target(c, x);
  }
  return out;
}

// Erases tree edge letters; inverse of inflate on lifted normal forms.
inline Word deflate(const GogContext& c, const Word& w) {
  Word out;
  for (LetterId x : w)
    if (x < c.small.size()) out.push_back(x);
  return out;
}

// Longest prefix that survives deflation intact (no trailing tree letters).
inline Word strip_trailing_tree(const GogContext& c, const Word& w) {
  size_t k = w.size();
  while (k > 0 && w[k - 1] >= c.small.size()) --k;
  return prefix(w, k);
}

inline Word edge_letters_only(const GogContext& c, const Word& w) {
  Word out;
  for (LetterId x : w)
    if (c.letter_dir[static_cast<size_t>(x)] >= 0) out.push_back(x);
  return out;
}

// Maximal suffix consisting of vertex letters at u.
inline Word vertex_suffix(const GogContext& c, const Word& w, int u) {
  size_t k = w.size();
  while (k > 0 && c.letter_dir[static_cast<size_t>(w[k - 1])] < 0 &&
         c.letter_vertex[static_cast<size_t>(w[k - 1])] == u)
    --k;
  return suffix_from(w, k);
}

// Last edge letter (tree or not) crossed when reading y from the basepoint
// and then walking the tree to the start vertex of a; -1 when the whole
// journey stays at the basepoint.
inline LetterId last_edge(const GogContext& c, const Word& y, LetterId a) {
  int cur = c.basepoint;
  LetterId last = -1;
  for (LetterId x : y) {
    const Word& p = c.tree_route[static_cast<size_t>(cur)][static_cast<size_t>(letter_source(c, x))];
    if (!p.empty()) last = p.back();
    if (c.letter_dir[static_cast<size_t>(x)] >= 0) last = x;
    cur = letter_target(c, x);
  }
  const Word& p = c.tree_route[static_cast<size_t>(cur)][static_cast<size_t>(letter_source(c, a))];
  if (!p.empty()) last = p.back();
  return last;
}

namespace detail {

inline Word gog_to_local(const GogContext& c, int u, const Word& w) {
  Word out;
  out.reserve(w.size());
  for (LetterId x : w) {
    if (c.letter_dir[static_cast<size_t>(x)] >= 0 || c.letter_vertex[static_cast<size_t>(x)] != u)
      raise("NotANormalForm", "letter '" + c.big.name(x) + "' does not belong to vertex " +
                                  std::to_string(u));
    out.push_back(x - c.vertex_offset[static_cast<size_t>(u)]);
  }
  return out;
}

inline Word gog_to_big(const GogContext& c, int u, const Word& w) {
  Word out;
  out.reserve(w.size());
  for (LetterId x : w) out.push_back(x + c.vertex_offset[static_cast<size_t>(u)]);
  return out;
}

// Value of the flow when a subgroup letter is pushed back across the edge it
// arrived by: the transported word alone for tree edges (their letters are
// erased), conjugated by the edge letter otherwise.
inline Word gog_crossing_value(const GogContext& c, int d, LetterId a) {
  const GogDirection& dir = c.dirs[static_cast<size_t>(d)];
  const Word& w = dir.transport.at(a);
  if (dir.in_tree) return w;
  return cat(Word{dir.reverse_letter}, w, Word{dir.letter});
}

inline Word gog_phi(const GogContext& c, const Word& y, LetterId a) {
  if (a < 0 || a >= c.small.size()) raise("UnknownLetter", "letter id out of range");
  // non-tree edge letters always label spanning-tree edges of the composite
  if (c.letter_dir[static_cast<size_t>(a)] >= 0) return Word{a};
  int u = c.letter_vertex[static_cast<size_t>(a)];
  LetterId f = last_edge(c, y, a);
  if (f < 0) {
    // the whole word lives in the basepoint group
    Word local = gog_to_local(c, c.basepoint, y);
    return gog_to_big(c, c.basepoint,
                      phi_eval(c.base, local, a - c.vertex_offset[static_cast<size_t>(c.basepoint)]));
  }
  int d = c.letter_dir[static_cast<size_t>(f)];
  const GogDirection& dir = c.dirs[static_cast<size_t>(d)];
  if (dir.to != u)
    raise("NotANormalForm", "word does not factor into vertex blocks along the tree");
  Word suf = vertex_suffix(c, y, u);
  if (suf.empty() && dir.transport.count(a)) return gog_crossing_value(c, d, a);
  const AutostackableStructure& local = c.dir_structure[static_cast<size_t>(d)].base;
  Word image = phi_eval(local, gog_to_local(c, u, suf),
                        a - c.vertex_offset[static_cast<size_t>(u)]);
  return gog_to_big(c, u, image);
}

// Acceptor of exactly the length-one words over the given letters.
inline Fsa letters_fsa(int nsym, const std::vector<LetterId>& letters) {
  Fsa m;
  m.num_symbols = nsym;
  m.num_states = 3;
  m.start = 0;
  m.accepting = {0, 1, 0};
  m.trans.assign(static_cast<size_t>(3) * nsym, 2);
  for (LetterId x : letters) m.trans[static_cast<size_t>(x)] = 1;
  return m;
}

}  // namespace detail

// ---- context construction --------------------------------------------------

inline std::shared_ptr<const GogContext> build_gog_context(const GraphOfGroupsSpec& spec,
                                                           int lift_check_radius = 8) {
  auto ctx = std::make_shared<GogContext>();
  GogContext& c = *ctx;
  int nv = spec.num_vertices;
  if (nv < 1) raise("SpecInvariantViolation", "a graph of groups needs at least one vertex");
  if (spec.basepoint < 0 || spec.basepoint >= nv)
    raise("SpecInvariantViolation", "basepoint is not a vertex");
  c.num_vertices = nv;
  c.basepoint = spec.basepoint;
  c.base = spec.base;

  // spanning tree shape
  int tree_count = 0;
  for (const GogEdge& e : spec.edges) {
    if (e.from < 0 || e.from >= nv || e.to < 0 || e.to >= nv)
      raise("SpecInvariantViolation", "edge endpoint is not a vertex");
    if (e.in_tree) {
      ++tree_count;
      if (e.from == e.to) raise("SpecInvariantViolation", "tree edges cannot be loops");
    }
    if (e.fwd.letter == e.rev.letter)
      raise("SpecInvariantViolation", "the two directions of an edge need distinct letters");
  }
  if (tree_count != nv - 1)
    raise("SpecInvariantViolation", "spanning tree must have exactly num_vertices - 1 edges, got " +
                                        std::to_string(tree_count));
  {
    std::vector<char> seen(static_cast<size_t>(nv), 0);
    std::vector<int> queue{spec.basepoint};
    seen[static_cast<size_t>(spec.basepoint)] = 1;
    for (size_t i = 0; i < queue.size(); ++i)
      for (const GogEdge& e : spec.edges) {
        if (!e.in_tree) continue;
        int v = -1;
        if (e.from == queue[i]) v = e.to;
        if (e.to == queue[i]) v = e.from;
        if (v >= 0 && !seen[static_cast<size_t>(v)]) {
          seen[static_cast<size_t>(v)] = 1;
          queue.push_back(v);
        }
      }
    for (int v = 0; v < nv; ++v)
      if (!seen[static_cast<size_t>(v)])
        raise("SpecInvariantViolation", "spanning tree does not reach vertex " + std::to_string(v));
  }

  // one alphabet per vertex, shared by every structure placed there
  std::vector<const Alphabet*> vertex_alpha(static_cast<size_t>(nv), nullptr);
  auto place = [&](int v, const Alphabet& a) {
    if (!vertex_alpha[static_cast<size_t>(v)]) {
      vertex_alpha[static_cast<size_t>(v)] = &a;
      return;
    }
    if (*vertex_alpha[static_cast<size_t>(v)] != a)
      raise("SpecInvariantViolation",
            "structures at vertex " + std::to_string(v) + " disagree on the alphabet");
  };
  place(spec.basepoint, spec.base.alphabet);
  for (const GogEdge& e : spec.edges) {
    place(e.to, e.fwd.structure.base.alphabet);
    place(e.from, e.rev.structure.base.alphabet);
  }
  for (int v = 0; v < nv; ++v)
    if (!vertex_alpha[static_cast<size_t>(v)])
      raise("SpecInvariantViolation", "vertex " + std::to_string(v) + " carries no structure");

  // globally unique names, then the combined alphabets
  {
    std::set<std::string> names;
    auto claim = [&](const std::string& n) {
      if (!names.insert(n).second)
        raise("SpecInvariantViolation", "letter name '" + n + "' is used twice across the spec");
    };
    for (int v = 0; v < nv; ++v)
      for (int i = 0; i < vertex_alpha[static_cast<size_t>(v)]->size(); ++i)
        claim(vertex_alpha[static_cast<size_t>(v)]->name(i));
    for (const GogEdge& e : spec.edges) {
      claim(e.fwd.letter);
      claim(e.rev.letter);
    }
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  c.vertex_offset.assign(static_cast<size_t>(nv), 0);
  {
    int off = 0;
    for (int v = 0; v < nv; ++v) {
      c.vertex_offset[static_cast<size_t>(v)] = off;
      auto ps = vertex_alpha[static_cast<size_t>(v)]->pairs();
      pairs.insert(pairs.end(), ps.begin(), ps.end());
      off += vertex_alpha[static_cast<size_t>(v)]->size();
    }
  }
  for (const GogEdge& e : spec.edges)
    if (!e.in_tree) pairs.emplace_back(e.fwd.letter, e.rev.letter);
  c.small = Alphabet::from_pairs(pairs);
  for (const GogEdge& e : spec.edges)
    if (e.in_tree) pairs.emplace_back(e.fwd.letter, e.rev.letter);
  c.big = Alphabet::from_pairs(pairs);
  int nb = c.big.size(), n = c.small.size();
  for (int i = 0; i < n; ++i)
    if (c.small.name(i) != c.big.name(i))
      raise("MalformedAutomaton", "composite alphabet is not a prefix of the lifted alphabet");

  c.letter_vertex.assign(static_cast<size_t>(nb), -1);
  c.letter_dir.assign(static_cast<size_t>(nb), -1);
  c.vertex_letters.assign(static_cast<size_t>(nv), {});
  for (int v = 0; v < nv; ++v)
    for (int i = 0; i < vertex_alpha[static_cast<size_t>(v)]->size(); ++i) {
      LetterId g = c.vertex_offset[static_cast<size_t>(v)] + i;
      c.letter_vertex[static_cast<size_t>(g)] = v;
      c.vertex_letters[static_cast<size_t>(v)].push_back(g);
    }

  // directions, local structures, transports
  for (size_t j = 0; j < spec.edges.size(); ++j) {
    const GogEdge& e = spec.edges[j];
    for (int side = 0; side < 2; ++side) {
      const GogArrow& arrow = side == 0 ? e.fwd : e.rev;
      GogDirection d;
      d.edge = static_cast<int>(j);
      d.forward = side == 0;
      d.from = side == 0 ? e.from : e.to;
      d.to = side == 0 ? e.to : e.from;
      d.in_tree = e.in_tree;
      d.letter = c.big.id(arrow.letter);
      d.reverse_letter = c.big.inverse(d.letter);
      d.reverse = static_cast<int>(2 * j + (side == 0 ? 1 : 0));
      c.letter_dir[static_cast<size_t>(d.letter)] = static_cast<int>(c.dirs.size());
      for (LetterId b : arrow.structure.subgroup_letters)
        d.sub.push_back(b + c.vertex_offset[static_cast<size_t>(d.to)]);
      std::sort(d.sub.begin(), d.sub.end());
      c.dirs.push_back(std::move(d));
      c.dir_structure.push_back(arrow.structure);
    }
  }
  for (size_t d = 0; d < c.dirs.size(); ++d) {
    const RespectingStructure& r = c.dir_structure[d];
    const GogDirection& dir = c.dirs[d];
    std::string where = "direction '" + c.big.name(dir.letter) + "'";
    for (LetterId b : dir.sub) {
      LetterId bi = c.big.inverse(b);
      if (!std::binary_search(dir.sub.begin(), dir.sub.end(), bi))
        raise("SpecInvariantViolation", where + ": subgroup letters are not inverse closed");
      // a subgroup letter accepted by the transversal would make the
      // crossing rewrite fire on a normal-form extension
      if (accepts(r.nf_tr, Word{b - c.vertex_offset[static_cast<size_t>(dir.to)]}))
        raise("SpecInvariantViolation",
              where + ": transversal language contains the subgroup letter '" + c.big.name(b) + "'");
    }
    if (!accepts(r.nf_tr, Word{}))
      raise("SpecInvariantViolation", where + ": transversal language must contain the empty word");
    if (!is_prefix_closed(r.nf_tr))
      raise("SpecInvariantViolation", where + ": transversal language must be prefix closed");
  }
  if (!accepts(spec.base.nf, Word{}) || !is_prefix_closed(spec.base.nf))
    raise("SpecInvariantViolation",
          "basepoint normal forms must be prefix closed and contain the empty word");

  // transports: exact domain, image over the opposite subgroup letters and
  // accepted by its subgroup normal forms, and the two directions must undo
  // each other up to normalization
  for (size_t di = 0; di < c.dirs.size(); ++di) {
    GogDirection& d = c.dirs[di];
    const GogDirection& r = c.dirs[static_cast<size_t>(d.reverse)];
    const GogEdge& e = spec.edges[static_cast<size_t>(d.edge)];
    const GogArrow& arrow = d.forward ? e.fwd : e.rev;
    const Alphabet& src_alpha = *vertex_alpha[static_cast<size_t>(d.from)];
    std::string where = "direction '" + c.big.name(d.letter) + "'";
    std::set<LetterId> dom;
    for (const auto& [name, value] : arrow.transport) {
      if (!vertex_alpha[static_cast<size_t>(d.to)]->has(name))
        raise("SpecInvariantViolation", where + ": transport key '" + name +
                                            "' is not a letter at vertex " + std::to_string(d.to));
      LetterId a = vertex_alpha[static_cast<size_t>(d.to)]->id(name) +
                   c.vertex_offset[static_cast<size_t>(d.to)];
      if (!std::binary_search(d.sub.begin(), d.sub.end(), a))
        raise("SpecInvariantViolation", where + ": transport key '" + name +
                                            "' is not a subgroup letter of this direction");
      if (!dom.insert(a).second)
        raise("SpecInvariantViolation", where + ": transport key '" + name + "' appears twice");
      Word local = parse_word(src_alpha, value);
      for (LetterId x : local) {
        LetterId big_x = x + c.vertex_offset[static_cast<size_t>(d.from)];
        if (!std::binary_search(r.sub.begin(), r.sub.end(), big_x))
          raise("SpecInvariantViolation", where + ": transport value for '" + name +
                                              "' leaves the opposite subgroup letters");
      }
      if (!accepts(c.dir_structure[static_cast<size_t>(d.reverse)].nf_h, local))
        raise("SpecInvariantViolation", where + ": transport value for '" + name +
                                            "' is not a subgroup normal form on the other side");
      d.transport[a] = detail::gog_to_big(c, d.from, local);
    }
    if (dom.size() != d.sub.size())
      raise("SpecInvariantViolation", where + ": transport must cover every subgroup letter");
  }
  for (size_t di = 0; di < c.dirs.size(); ++di) {
    const GogDirection& d = c.dirs[di];
    const GogDirection& r = c.dirs[static_cast<size_t>(d.reverse)];
    const AutostackableStructure& home = c.dir_structure[di].base;
    for (const auto& [a, w] : d.transport) {
      Word back;
      for (LetterId b : w) {
        const Word& img = r.transport.at(b);
        back.insert(back.end(), img.begin(), img.end());
      }
      Word lhs = normal_form(home, detail::gog_to_local(c, d.to, back));
      Word rhs = normal_form(home, Word{a - c.vertex_offset[static_cast<size_t>(d.to)]});
      if (lhs != rhs)
        raise("SpecInvariantViolation", "transports across '" + c.big.name(d.letter) + "' and '" +
                                            c.big.name(d.reverse_letter) +
                                            "' are not mutually inverse at letter '" +
                                            c.big.name(a) + "'");
    }
  }

  // unique tree paths between vertices, as words of tree edge letters
  c.tree_route.assign(static_cast<size_t>(nv), std::vector<Word>(static_cast<size_t>(nv)));
  for (int u = 0; u < nv; ++u) {
    std::vector<char> seen(static_cast<size_t>(nv), 0);
    std::vector<int> queue{u};
    seen[static_cast<size_t>(u)] = 1;
    for (size_t i = 0; i < queue.size(); ++i) {
      int v = queue[i];
      for (const GogDirection& d : c.dirs) {
        if (!d.in_tree || d.from != v || seen[static_cast<size_t>(d.to)]) continue;
        seen[static_cast<size_t>(d.to)] = 1;
        c.tree_route[static_cast<size_t>(u)][static_cast<size_t>(d.to)] =
            cat(c.tree_route[static_cast<size_t>(u)][static_cast<size_t>(v)], Word{d.letter});
        queue.push_back(d.to);
      }
    }
  }

  // lifted normal forms: basepoint normal forms, then edge-letter-prefixed
  // transversal blocks, minus the four illegal shapes
  Fsa sig_big = Fsa::sigma_star(nb);
  std::vector<LetterId> embed_base(static_cast<size_t>(spec.base.alphabet.size()));
  for (size_t i = 0; i < embed_base.size(); ++i)
    embed_base[i] = static_cast<LetterId>(i) + c.vertex_offset[static_cast<size_t>(spec.basepoint)];
  Fsa nf0 = remap_symbols(spec.base.nf, nb, embed_base);
  std::vector<Fsa> tr_big(c.dirs.size());
  {
    std::vector<Fsa> blocks;
    for (size_t di = 0; di < c.dirs.size(); ++di) {
      const GogDirection& d = c.dirs[di];
      std::vector<LetterId> embed(static_cast<size_t>(
          vertex_alpha[static_cast<size_t>(d.to)]->size()));
      for (size_t i = 0; i < embed.size(); ++i)
        embed[i] = static_cast<LetterId>(i) + c.vertex_offset[static_cast<size_t>(d.to)];
      tr_big[di] = remap_symbols(c.dir_structure[di].nf_tr, nb, embed);
      blocks.push_back(concat(Fsa::single_word(nb, Word{d.letter}), tr_big[di]));
    }
    Fsa body = blocks.empty() ? Fsa::epsilon_only(nb) : star(unite_many(blocks));
    Fsa base_lang = concat(nf0, body);

    std::vector<Fsa> bad;
    for (const GogDirection& d : c.dirs)  // immediate backtrack e e^-1
      bad.push_back(concat(sig_big, concat(Fsa::single_word(nb, Word{d.letter, d.reverse_letter}),
                                           sig_big)));
    for (size_t di = 0; di < c.dirs.size(); ++di)  // consecutive blocks must chain
      for (const GogDirection& d2 : c.dirs) {
        if (c.dirs[di].to == d2.from) continue;
        Fsa mid = concat(Fsa::single_word(nb, Word{c.dirs[di].letter}), tr_big[di]);
        bad.push_back(concat(sig_big, concat(mid, concat(Fsa::single_word(nb, Word{d2.letter}),
                                                         sig_big))));
      }
    for (const GogDirection& d : c.dirs)  // first edge must leave the basepoint
      if (d.from != spec.basepoint)
        bad.push_back(concat(nf0, concat(Fsa::single_word(nb, Word{d.letter}), sig_big)));
    {
      std::vector<LetterId> tree_letters;
      for (const GogDirection& d : c.dirs)
        if (d.in_tree) tree_letters.push_back(d.letter);
      if (!tree_letters.empty())  // no trailing tree letters
        bad.push_back(concat(sig_big, detail::letters_fsa(nb, tree_letters)));
    }
    c.lifted_nf = bad.empty() ? minimize(base_lang)
                              : minimize(difference(base_lang, unite_many(bad)));
  }
  if (!accepts(c.lifted_nf, Word{}))
    raise("MalformedAutomaton", "lifted normal forms lost the empty word");

  {
    std::vector<Word> images(static_cast<size_t>(nb));
    for (int i = 0; i < n; ++i) images[static_cast<size_t>(i)] = Word{i};
    c.nf = minimize(hom_image(c.lifted_nf, n, images));
  }
  if (!is_prefix_closed(c.nf))
    raise("SpecInvariantViolation", "composite normal forms are not prefix closed");

  // erasing the tree detours must stay one-to-one on lifted normal forms
  {
    std::map<Word, Word> seen;
    for (const Word& w : enumerate_upto(c.lifted_nf, lift_check_radius)) {
      Word flat = deflate(c, w);
      auto [it, fresh] = seen.emplace(flat, w);
      if (!fresh)
        raise("DeflationNotInjective",
              "lifted normal forms '" + format_word(c.big, it->second) + "' and '" +
                  format_word(c.big, w) + "' erase to the same composite word");
    }
  }

  c.bound = 2;
  {
    int m = 0;
    m = std::max(m, spec.base.bound);
    for (const RespectingStructure& r : c.dir_structure) m = std::max(m, r.base.bound);
    for (const GogDirection& d : c.dirs)
      for (const auto& [a, w] : d.transport) m = std::max(m, static_cast<int>(w.size()));
    c.bound = 2 + m;
  }
  return ctx;
}

// ---- stacking graph ---------------------------------------------------------

// Compiles the acceptor of {(y, a, phi(y, a))} over padded triples. Needs a
// stacking graph for every vertex structure (precompiled or derivable from a
// state table). With diagnostics on, also proves at the language level that
// the pieces define a total function on Nf x A.
inline Fsa gog_compile_graph(const GogContext& c, bool diagnostics = true) {
  int n = c.small.size(), nb = c.big.size();
  TupleAlphabet ta({n, n, n});
  auto local_graph = [](const AutostackableStructure& s) -> Fsa {
    if (s.graph_phi) return *s.graph_phi;
    if (s.stacking.kind == StackingMap::Kind::StateTable) return compile_state_table_graph(s);
    raise("GraphNotCompilable",
          "a vertex structure has neither a compiled stacking graph nor a state table");
  };
  Fsa sig = Fsa::sigma_star(n), sig_big = Fsa::sigma_star(nb), eps = Fsa::epsilon_only(n);
  std::vector<Word> defl_images(static_cast<size_t>(nb));
  for (int i = 0; i < n; ++i) defl_images[static_cast<size_t>(i)] = Word{i};

  // words with empty vertex suffix at u, and their complement in Nf
  std::vector<Fsa> S(static_cast<size_t>(c.num_vertices));
  std::vector<Fsa> notS(static_cast<size_t>(c.num_vertices));
  for (int u = 0; u < c.num_vertices; ++u) {
    std::vector<LetterId> others;
    for (int x = 0; x < n; ++x)
      if (c.letter_vertex[static_cast<size_t>(x)] != u) others.push_back(x);
    S[static_cast<size_t>(u)] = minimize(
        unite(eps, intersect(c.nf, concat(sig, detail::letters_fsa(n, others)))));
    notS[static_cast<size_t>(u)] = minimize(difference(c.nf, S[static_cast<size_t>(u)]));
  }

  // words whose last crossed edge is the given direction
  std::vector<Fsa> R(c.dirs.size());
  for (size_t di = 0; di < c.dirs.size(); ++di) {
    const GogDirection& d = c.dirs[di];
    int u = d.to;
    std::vector<Fsa> parts;
    for (int v = 0; v < c.num_vertices; ++v) {
      const Word& p = c.tree_route[static_cast<size_t>(v)][static_cast<size_t>(u)];
      if (p.empty() || p.back() != d.letter) continue;
      std::vector<LetterId> enders = c.vertex_letters[static_cast<size_t>(v)];
      for (const GogDirection& d2 : c.dirs)
        if (!d2.in_tree && d2.to == v) enders.push_back(d2.letter);
      parts.push_back(intersect(c.nf, concat(sig, detail::letters_fsa(n, enders))));
    }
    {
      const Word& p = c.tree_route[static_cast<size_t>(c.basepoint)][static_cast<size_t>(u)];
      if (!p.empty() && p.back() == d.letter) parts.push_back(eps);
    }
    Fsa lifted_tail = concat(sig_big, concat(Fsa::single_word(nb, Word{d.letter}),
                                             Fsa::words_over(nb, c.vertex_letters[static_cast<size_t>(u)])));
    parts.push_back(minimize(hom_image(intersect(c.lifted_nf, lifted_tail), n, defl_images)));
    R[di] = minimize(unite_many(parts));
  }

  std::vector<Fsa> pieces;
  std::vector<std::vector<std::pair<Fsa, Word>>> by_letter(static_cast<size_t>(n));
  auto add_piece = [&](const Fsa& src, LetterId a, const Word& value) {
    pieces.push_back(minimize(product(ta, src, Fsa::single_word(n, Word{a}),
                                      Fsa::single_word(n, value))));
    by_letter[static_cast<size_t>(a)].push_back({src, value});
  };

  // non-tree edge letters ride along unchanged on every normal form
  for (const GogDirection& d : c.dirs)
    if (!d.in_tree) add_piece(c.nf, d.letter, Word{d.letter});

  // per direction: subgroup letters crossing back, then the local stacking
  for (size_t di = 0; di < c.dirs.size(); ++di) {
    const GogDirection& d = c.dirs[di];
    int u = d.to;
    const AutostackableStructure& local = c.dir_structure[di].base;
    Fsa graph = local_graph(local);
    TupleAlphabet ta_loc = local.graph_alphabet();
    int n_loc = local.alphabet.size();
    auto image = phi_image_superset(local);
    if (!image)
      raise("GraphNotCompilable", "cannot enumerate the stacking image at direction '" +
                                      c.big.name(d.letter) + "'");
    std::vector<int> embed(static_cast<size_t>(n_loc));
    for (int i = 0; i < n_loc; ++i)
      embed[static_cast<size_t>(i)] = i + c.vertex_offset[static_cast<size_t>(u)];
    Fsa crossing_src = intersect(R[di], S[static_cast<size_t>(u)]);
    if (!is_empty(crossing_src))
      for (LetterId a : d.sub)
        add_piece(crossing_src, a, detail::gog_crossing_value(c, static_cast<int>(di), a));
    for (int a_loc = 0; a_loc < n_loc; ++a_loc) {
      LetterId a = a_loc + c.vertex_offset[static_cast<size_t>(u)];
      bool a_sub = std::binary_search(d.sub.begin(), d.sub.end(), a);
      for (const Word& w_loc : *image) {
        Fsa tri = intersect(graph, product(ta_loc, Fsa::sigma_star(n_loc),
                                           Fsa::single_word(n_loc, Word{a_loc}),
                                           Fsa::single_word(n_loc, w_loc)));
        if (is_empty(tri)) continue;
        Fsa starts = remap_symbols(projection(ta_loc, tri, 0), n, embed);
        Fsa Q = minimize(intersect(c.nf, concat(S[static_cast<size_t>(u)], starts)));
        Fsa L = a_sub ? intersect(R[di], intersect(notS[static_cast<size_t>(u)], Q))
                      : intersect(R[di], Q);
        if (!is_empty(L)) add_piece(L, a, detail::gog_to_big(c, u, w_loc));
      }
    }
  }

  // basepoint stacking handles words that never crossed an edge
  {
    int u = c.basepoint;
    Fsa graph = local_graph(c.base);
    TupleAlphabet ta_loc = c.base.graph_alphabet();
    int n_loc = c.base.alphabet.size();
    auto image = phi_image_superset(c.base);
    if (!image)
      raise("GraphNotCompilable", "cannot enumerate the stacking image at the basepoint");
    std::vector<int> embed(static_cast<size_t>(n_loc));
    for (int i = 0; i < n_loc; ++i)
      embed[static_cast<size_t>(i)] = i + c.vertex_offset[static_cast<size_t>(u)];
    Fsa nf0 = remap_symbols(c.base.nf, n, embed);
    for (int a_loc = 0; a_loc < n_loc; ++a_loc) {
      LetterId a = a_loc + c.vertex_offset[static_cast<size_t>(u)];
      for (const Word& w_loc : *image) {
        Fsa tri = intersect(graph, product(ta_loc, Fsa::sigma_star(n_loc),
                                           Fsa::single_word(n_loc, Word{a_loc}),
                                           Fsa::single_word(n_loc, w_loc)));
        if (is_empty(tri)) continue;
        Fsa starts = remap_symbols(projection(ta_loc, tri, 0), n, embed);
        Fsa Q = minimize(intersect(c.nf, concat(S[static_cast<size_t>(u)], starts)));
        Fsa L = intersect(nf0, Q);
        if (!is_empty(L)) add_piece(L, a, detail::gog_to_big(c, u, w_loc));
      }
    }
  }

  if (diagnostics) {
    for (int a = 0; a < n; ++a) {
      const auto& entries = by_letter[static_cast<size_t>(a)];
      for (size_t i = 0; i < entries.size(); ++i)
        for (size_t j = i + 1; j < entries.size(); ++j) {
          if (entries[i].second == entries[j].second) continue;
          if (!is_empty(intersect(entries[i].first, entries[j].first)))
            raise("SpecInvariantViolation",
                  "stacking graph assigns two values to some edge labeled '" + c.small.name(a) +
                      "'");
        }
      std::vector<Fsa> srcs;
      for (const auto& [src, value] : entries) srcs.push_back(src);
      Fsa cover = srcs.empty() ? Fsa::reject_all(n) : unite_many(srcs);
      if (!is_empty(difference(c.nf, cover)))
        raise("SpecInvariantViolation",
              "stacking graph misses some normal form under letter '" + c.small.name(a) + "'");
    }
  }

  if (pieces.empty()) return Fsa::reject_all(ta.num_symbols());
  return minimize(unite_many(pieces));
}

// ---- composition ------------------------------------------------------------

struct GogOptions {
  int lift_check_radius = 8;  // depth of the deflation injectivity sweep
  bool compile_graph = false;
  bool graph_diagnostics = true;
};

inline json gog_spec_to_json(const GraphOfGroupsSpec& spec) {
  json j;
  j["num_vertices"] = spec.num_vertices;
  j["basepoint"] = spec.basepoint;
  j["base"] = structure_to_json(spec.base);
  j["edges"] = json::array();
  for (const GogEdge& e : spec.edges) {
    auto arrow = [](const GogArrow& a) {
      json ja;
      ja["letter"] = a.letter;
      ja["structure"] = respecting_to_json(a.structure);
      ja["transport"] = json::object();
      for (const auto& [name, value] : a.transport) ja["transport"][name] = value;
      return ja;
    };
    j["edges"].push_back({{"from", e.from},
                          {"to", e.to},
                          {"in_tree", e.in_tree},
                          {"fwd", arrow(e.fwd)},
                          {"rev", arrow(e.rev)}});
  }
  return j;
}

inline GraphOfGroupsSpec gog_spec_from_json(const json& j,
                                            const StructureLoader& load = structure_from_json_leaf) {
  GraphOfGroupsSpec spec;
  spec.num_vertices = j.at("num_vertices").get<int>();
  spec.basepoint = j.at("basepoint").get<int>();
  spec.base = load(j.at("base"));
  auto arrow = [&load](const json& ja) {
    GogArrow a;
    a.letter = ja.at("letter").get<std::string>();
    a.structure = respecting_from_json(ja.at("structure"), load);
    for (const auto& [name, value] : ja.at("transport").items())
      a.transport.emplace_back(name, value.get<std::string>());
    return a;
  };
  for (const json& je : j.at("edges")) {
    GogEdge e;
    e.from = je.at("from").get<int>();
    e.to = je.at("to").get<int>();
    e.in_tree = je.at("in_tree").get<bool>();
    e.fwd = arrow(je.at("fwd"));
    e.rev = arrow(je.at("rev"));
    spec.edges.push_back(std::move(e));
  }
  return spec;
}

inline AutostackableStructure gog_compose(const GraphOfGroupsSpec& spec,
                                          const GogOptions& opts = {}) {
  auto ctx = build_gog_context(spec, opts.lift_check_radius);
  AutostackableStructure out;
  out.alphabet = ctx->small;
  out.nf = ctx->nf;
  out.bound = ctx->bound;
  out.stacking.kind = StackingMap::Kind::Composed;
  out.stacking.combinator = "gog";
  out.stacking.eval_fn = [ctx](const Word& y, LetterId a) { return detail::gog_phi(*ctx, y, a); };
  {
    bool enumerable = true;
    std::set<Word> img;
    for (int a = 0; a < ctx->small.size(); ++a) img.insert(Word{a});
    for (size_t di = 0; di < ctx->dirs.size() && enumerable; ++di) {
      for (const auto& [a, w] : ctx->dirs[di].transport)
        img.insert(detail::gog_crossing_value(*ctx, static_cast<int>(di), a));
      auto local = phi_image_superset(ctx->dir_structure[di].base);
      if (!local) {
        enumerable = false;
        break;
      }
      for (const Word& w : *local) img.insert(detail::gog_to_big(*ctx, ctx->dirs[di].to, w));
    }
    auto local = phi_image_superset(ctx->base);
    if (!local)
      enumerable = false;
    else
      for (const Word& w : *local) img.insert(detail::gog_to_big(*ctx, ctx->basepoint, w));
    if (enumerable) {
      std::vector<Word> all(img.begin(), img.end());
      out.stacking.image_fn = [all]() { return all; };
    }
  }
  out.stacking.recipe_json = gog_spec_to_json(spec).dump();
  if (opts.compile_graph) out.graph_phi = gog_compile_graph(*ctx, opts.graph_diagnostics);
  return out;
}

}  // namespace autostack
