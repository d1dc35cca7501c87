#pragma once

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fsa.hpp"
#include "json_io.hpp"
#include "oracles.hpp"
#include "padded.hpp"
#include "stacking.hpp"
#include "verify.hpp"
#include "words.hpp"

namespace autostack {

// Coset-automatic data for a subgroup H of G: a prefix-closed regular language
// of unique coset representatives over the G alphabet C, plus enough ball
// arithmetic near the identity to drive the pair multiplier automata. Element
// keys are opaque strings; bounded_mult(g, a, b) returns the key of a^-1 g b
// (letter -1 meaning no letter) or nullopt when the product leaves the ball.
struct CosetAutomaticData {
  Alphabet g_alphabet;
  Fsa transversal;
  int fellow_constant = 0;
  std::string identity;
  std::vector<std::string> ball;
  std::function<std::optional<std::string>(const std::string&, int, int)> bounded_mult;
  // ball key -> subgroup normal form, for every ball element lying in H
  std::vector<std::pair<std::string, std::string>> subgroup_words;
  // subgroup letter name -> ball key of the element it represents
  std::vector<std::pair<std::string, std::string>> subgroup_letter_keys;
};

inline json coset_data_to_json(const CosetAutomaticData& d) {
  if (!d.bounded_mult)
    raise("SpecInvariantViolation", "coset data has no ball multiplication oracle");
  json j;
  j["alphabet"] = alphabet_to_json(d.g_alphabet);
  j["transversal"] = fsa_to_json(d.transversal, letter_names(d.g_alphabet));
  j["fellow_constant"] = d.fellow_constant;
  j["identity"] = d.identity;
  j["ball"] = d.ball;
  // the whole domain the construction ever queries; out-of-ball entries are
  // simply absent
  json mult = json::array();
  int nc = d.g_alphabet.size();
  for (const std::string& key : d.ball)
    for (int a = -1; a < nc; ++a)
      for (int b = -1; b < nc; ++b) {
        std::optional<std::string> r = d.bounded_mult(key, a, b);
        if (!r) continue;
        mult.push_back(json{{"key", key},
                            {"left", a < 0 ? "" : d.g_alphabet.name(a)},
                            {"right", b < 0 ? "" : d.g_alphabet.name(b)},
                            {"value", *r}});
      }
  j["mult"] = mult;
  json sw = json::array();
  for (const auto& [key, word] : d.subgroup_words)
    sw.push_back(json{{"key", key}, {"word", word}});
  j["subgroup_words"] = sw;
  json sk = json::array();
  for (const auto& [letter, key] : d.subgroup_letter_keys)
    sk.push_back(json{{"letter", letter}, {"key", key}});
  j["subgroup_letter_keys"] = sk;
  return j;
}

inline CosetAutomaticData coset_data_from_json(const json& j) {
  CosetAutomaticData d;
  d.g_alphabet = alphabet_from_json(j.at("alphabet"));
  d.transversal = fsa_from_json(j.at("transversal"), letter_names(d.g_alphabet));
  d.fellow_constant = j.at("fellow_constant").get<int>();
  d.identity = j.at("identity").get<std::string>();
  d.ball = j.at("ball").get<std::vector<std::string>>();
  auto table = std::make_shared<std::map<std::array<std::string, 3>, std::string>>();
  for (const auto& e : j.at("mult"))
    (*table)[{e.at("key").get<std::string>(), e.at("left").get<std::string>(),
              e.at("right").get<std::string>()}] = e.at("value").get<std::string>();
  Alphabet ca = d.g_alphabet;
  d.bounded_mult = [table, ca](const std::string& key, int a,
                               int b) -> std::optional<std::string> {
    auto it = table->find({key, a < 0 ? std::string() : ca.name(a),
                           b < 0 ? std::string() : ca.name(b)});
    if (it == table->end()) return std::nullopt;
    return it->second;
  };
  for (const auto& e : j.at("subgroup_words"))
    d.subgroup_words.emplace_back(e.at("key").get<std::string>(),
                                  e.at("word").get<std::string>());
  for (const auto& e : j.at("subgroup_letter_keys"))
    d.subgroup_letter_keys.emplace_back(e.at("letter").get<std::string>(),
                                        e.at("key").get<std::string>());
  return d;
}

struct CosetSpec {
  AutostackableStructure subgroup;
  CosetAutomaticData data;
};

inline json coset_spec_to_json(const AutostackableStructure& subgroup,
                               const CosetAutomaticData& data) {
  json j;
  j["subgroup"] = structure_to_json(subgroup);
  j["data"] = coset_data_to_json(data);
  return j;
}

inline CosetSpec coset_spec_from_json(const json& j,
                                      const StructureLoader& loader = structure_from_json_leaf) {
  CosetSpec s;
  s.subgroup = loader(j.at("subgroup"));
  s.data = coset_data_from_json(j.at("data"));
  return s;
}

namespace detail {

// Common part of every multiplier automaton M_{h,c}: states are (pair product
// state, ball element) plus one absorbing fail state; only the start state
// depends on h and only the accept set depends on c.
struct MultiplierSkeleton {
  Fsa tr;          // transversal over the coset alphabet, minimized
  TupleAlphabet ta;
  Fsa pair;        // synchronous product transversal x transversal
  std::vector<std::string> ball;
  std::unordered_map<std::string, int> ball_index;
  int ball_size = 0;
  int id_ball = 0;
  std::vector<int> letter_key;  // coset letter -> ball index of that element
  int nsym = 0;
  int fail = 0;
  int mu = 0;                   // total state count, the length scale of phi
  std::vector<int> step;        // mu x nsym

  int state(int pq, int bi) const { return pq * ball_size + bi; }
  bool accept(int s, int c) const {
    if (s == fail) return false;
    return pair.accepting[static_cast<size_t>(s / ball_size)] &&
           s % ball_size == letter_key[static_cast<size_t>(c)];
  }
};

inline MultiplierSkeleton build_skeleton(const CosetAutomaticData& d) {
  MultiplierSkeleton k;
  int nc = d.g_alphabet.size();
  if (nc == 0) raise("SpecInvariantViolation", "coset alphabet is empty");
  if (d.transversal.num_symbols != nc)
    raise("MalformedAutomaton", "transversal automaton is not over the coset alphabet");
  if (!d.bounded_mult)
    raise("SpecInvariantViolation", "coset data has no ball multiplication oracle");
  k.tr = minimize(d.transversal);
  if (is_empty(k.tr)) raise("SpecInvariantViolation", "transversal language is empty");
  if (!is_prefix_closed(k.tr))
    raise("NonPrefixClosedTransversal", "transversal language must be prefix-closed");
  k.ball = d.ball;
  for (int i = 0; i < static_cast<int>(k.ball.size()); ++i) {
    if (k.ball_index.count(k.ball[static_cast<size_t>(i)]))
      raise("SpecInvariantViolation",
            "duplicate ball key '" + k.ball[static_cast<size_t>(i)] + "'");
    k.ball_index[k.ball[static_cast<size_t>(i)]] = i;
  }
  k.ball_size = static_cast<int>(k.ball.size());
  auto idit = k.ball_index.find(d.identity);
  if (idit == k.ball_index.end())
    raise("SpecInvariantViolation", "ball does not contain the identity key");
  k.id_ball = idit->second;
  std::optional<std::string> same = d.bounded_mult(d.identity, -1, -1);
  if (!same || *same != d.identity)
    raise("OracleInconsistent", "ball multiplication does not fix the identity");
  k.letter_key.assign(static_cast<size_t>(nc), -1);
  for (int c = 0; c < nc; ++c) {
    std::optional<std::string> r = d.bounded_mult(d.identity, -1, c);
    if (!r)
      raise("BallTooSmall",
            "ball does not contain generator '" + d.g_alphabet.name(c) + "'");
    auto it = k.ball_index.find(*r);
    if (it == k.ball_index.end())
      raise("OracleInconsistent",
            "ball multiplication returned undeclared key '" + *r + "'");
    k.letter_key[static_cast<size_t>(c)] = it->second;
  }
  k.ta = TupleAlphabet({nc, nc});
  k.pair = product(k.ta, k.tr, k.tr);
  k.nsym = k.ta.num_symbols();
  k.fail = k.pair.num_states * k.ball_size;
  k.mu = k.fail + 1;
  k.step.assign(static_cast<size_t>(k.mu) * k.nsym, k.fail);
  // the ball component of a transition only depends on the letters read
  std::vector<int> ball_step(static_cast<size_t>(k.nsym) * k.ball_size, k.fail);
  for (int code = 0; code < k.nsym; ++code) {
    int a = code / (nc + 1), b = code % (nc + 1);
    if (a == nc) a = -1;
    if (b == nc) b = -1;
    for (int bi = 0; bi < k.ball_size; ++bi) {
      std::optional<std::string> r = d.bounded_mult(k.ball[static_cast<size_t>(bi)], a, b);
      if (!r) continue;
      auto it = k.ball_index.find(*r);
      if (it == k.ball_index.end())
        raise("OracleInconsistent",
              "ball multiplication returned undeclared key '" + *r + "'");
      ball_step[static_cast<size_t>(code) * k.ball_size + bi] = it->second;
    }
  }
  for (int pq = 0; pq < k.pair.num_states; ++pq)
    for (int code = 0; code < k.nsym; ++code) {
      int pq2 = k.pair.next(pq, code);
      for (int bi = 0; bi < k.ball_size; ++bi) {
        int bi2 = ball_step[static_cast<size_t>(code) * k.ball_size + bi];
        k.step[static_cast<size_t>(k.state(pq, bi)) * k.nsym + code] =
            bi2 == k.fail ? k.fail : k.state(pq2, bi2);
      }
    }
  return k;
}

// Shortest continuation from every state to an accept state of M_{.,c}, with
// ties broken by the smallest tuple code (shortlex on padded pairs). With
// tail_only the continuation may only pad the first track.
inline void shortest_to_accept(const MultiplierSkeleton& k, int c, bool tail_only,
                               std::vector<int>& dist, std::vector<int>& next_code) {
  int nc = k.ta.comp_sizes[0];
  dist.assign(static_cast<size_t>(k.mu), -1);
  next_code.assign(static_cast<size_t>(k.mu), -1);
  std::vector<int> codes;
  for (int code = 0; code < k.nsym; ++code)
    if (!tail_only || code / (nc + 1) == nc) codes.push_back(code);
  std::vector<std::vector<int>> rev(static_cast<size_t>(k.mu));
  for (int s = 0; s < k.mu; ++s)
    for (int code : codes)
      rev[static_cast<size_t>(k.step[static_cast<size_t>(s) * k.nsym + code])].push_back(s);
  std::deque<int> q;
  for (int s = 0; s < k.mu; ++s)
    if (k.accept(s, c)) {
      dist[static_cast<size_t>(s)] = 0;
      q.push_back(s);
    }
  while (!q.empty()) {
    int t = q.front();
    q.pop_front();
    for (int s : rev[static_cast<size_t>(t)])
      if (dist[static_cast<size_t>(s)] < 0) {
        dist[static_cast<size_t>(s)] = dist[static_cast<size_t>(t)] + 1;
        q.push_back(s);
      }
  }
  for (int s = 0; s < k.mu; ++s) {
    if (dist[static_cast<size_t>(s)] <= 0) continue;
    for (int code : codes)
      if (dist[static_cast<size_t>(k.step[static_cast<size_t>(s) * k.nsym + code])] ==
          dist[static_cast<size_t>(s)] - 1) {
        next_code[static_cast<size_t>(s)] = code;
        break;
      }
  }
}

// Shortlex-least coset word reaching the target ball element, found by
// breadth-first search through the multiplication oracle. The ball must
// contain everything within distance max(fellow constant, found length) of
// the identity, otherwise the data cannot support the construction.
inline Word shortlex_ball_word(const CosetAutomaticData& d,
                               const std::unordered_map<std::string, int>& ball_index,
                               int id_ball, int target, const std::string& label) {
  int nc = d.g_alphabet.size();
  int n = static_cast<int>(d.ball.size());
  std::vector<int> depth(static_cast<size_t>(n), -1), par(static_cast<size_t>(n), -1),
      via(static_cast<size_t>(n), -1);
  std::deque<int> q;
  depth[static_cast<size_t>(id_ball)] = 0;
  q.push_back(id_ball);
  int oob_depth = -1;
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    for (int c = 0; c < nc; ++c) {
      std::optional<std::string> r = d.bounded_mult(d.ball[static_cast<size_t>(s)], -1, c);
      if (!r) {
        if (oob_depth < 0 || depth[static_cast<size_t>(s)] < oob_depth)
          oob_depth = depth[static_cast<size_t>(s)];
        continue;
      }
      auto it = ball_index.find(*r);
      if (it == ball_index.end())
        raise("OracleInconsistent",
              "ball multiplication returned undeclared key '" + *r + "'");
      if (depth[static_cast<size_t>(it->second)] >= 0) continue;
      depth[static_cast<size_t>(it->second)] = depth[static_cast<size_t>(s)] + 1;
      par[static_cast<size_t>(it->second)] = s;
      via[static_cast<size_t>(it->second)] = c;
      q.push_back(it->second);
    }
  }
  if (depth[static_cast<size_t>(target)] < 0)
    raise("BallTooSmall", "element for '" + label + "' is not reachable inside the ball");
  int required = std::max(d.fellow_constant, depth[static_cast<size_t>(target)]);
  if (oob_depth >= 0 && oob_depth < required)
    raise("BallTooSmall", "ball does not cover radius " + std::to_string(required) +
                              " needed for '" + label + "'");
  Word w;
  for (int s = target; s != id_ball; s = par[static_cast<size_t>(s)])
    w.push_back(via[static_cast<size_t>(s)]);
  std::reverse(w.begin(), w.end());
  return w;
}

struct CosetFactor {
  int h_ball = -1;
  Word x;       // subgroup part, a normal form over the subgroup letters
  Word zprime;  // transversal part over the coset letters
};

struct CosetContext {
  AutostackableStructure sub;
  MultiplierSkeleton sk;
  Alphabet alpha;   // subgroup letters first, coset letters after
  Alphabet calpha;  // coset alphabet alone, for messages
  int nb = 0;
  int nc = 0;
  Fsa nf, h_nf, tr_nf;
  std::vector<std::vector<int>> live_dist, live_next;  // [c][state], all codes
  std::vector<std::vector<int>> tail_dist, tail_next;  // [c][state], track one padded
  std::vector<std::pair<int, Word>> sub_words;         // ball index -> word over B
  std::vector<Word> sl_c;                              // per subgroup letter
  int bound = 0;

  mutable std::mutex factor_mutex;
  mutable std::map<std::pair<Word, int>, CosetFactor> factor_cache;
};

// Factor z.c as h.z' with h a ball element of H and z' a transversal word, by
// running the multiplier skeleton along z with the second track free. Exactly
// one ball candidate must succeed; anything else means the data lies about
// the transversal or the ball.
inline CosetFactor factorize(const CosetContext& c, const Word& z, int cc) {
  const MultiplierSkeleton& k = c.sk;
  const int L = static_cast<int>(z.size());
  const int nc = c.nc;
  struct Node {
    int state;
    int par;
    signed char digit;  // second-track digit read entering this node, nc = pad
  };
  thread_local std::vector<long long> stamp;
  thread_local long long gen = 0;
  if (static_cast<int>(stamp.size()) < k.mu) stamp.resize(static_cast<size_t>(k.mu), 0);

  CosetFactor out;
  int successes = 0;
  for (const auto& [hbi, hword] : c.sub_words) {
    int start = k.state(k.pair.start, hbi);
    if (c.live_dist[static_cast<size_t>(cc)][static_cast<size_t>(start)] < 0) continue;
    std::vector<std::vector<Node>> layers(static_cast<size_t>(L) + 1);
    ++gen;
    stamp[static_cast<size_t>(start)] = gen;
    layers[0].push_back({start, -1, 0});
    for (int d = 0; d < L && !layers[static_cast<size_t>(d)].empty(); ++d) {
      ++gen;
      for (int ni = 0; ni < static_cast<int>(layers[static_cast<size_t>(d)].size()); ++ni) {
        int s = layers[static_cast<size_t>(d)][static_cast<size_t>(ni)].state;
        for (int t2 = 0; t2 <= nc; ++t2) {
          int code = z[static_cast<size_t>(d)] * (nc + 1) + t2;
          int ns = k.step[static_cast<size_t>(s) * k.nsym + code];
          if (c.live_dist[static_cast<size_t>(cc)][static_cast<size_t>(ns)] < 0) continue;
          if (stamp[static_cast<size_t>(ns)] == gen) continue;
          stamp[static_cast<size_t>(ns)] = gen;
          layers[static_cast<size_t>(d) + 1].push_back(
              {ns, ni, static_cast<signed char>(t2)});
        }
      }
    }
    int found = -1;
    for (int ni = 0; ni < static_cast<int>(layers[static_cast<size_t>(L)].size()); ++ni)
      if (c.tail_dist[static_cast<size_t>(cc)]
                     [static_cast<size_t>(layers[static_cast<size_t>(L)]
                                              [static_cast<size_t>(ni)].state)] >= 0) {
        found = ni;
        break;
      }
    if (found < 0) continue;
    if (++successes > 1)
      raise("InconsistentCosetData",
            "several subgroup elements carry '" +
                format_word(c.calpha, cat(z, Word{cc})) + "' to the transversal");
    Word zp;
    for (int d = L, i = found; d > 0; i = layers[static_cast<size_t>(d--)][static_cast<size_t>(i)].par)
      if (layers[static_cast<size_t>(d)][static_cast<size_t>(i)].digit < nc)
        zp.push_back(layers[static_cast<size_t>(d)][static_cast<size_t>(i)].digit);
    std::reverse(zp.begin(), zp.end());
    int s = layers[static_cast<size_t>(L)][static_cast<size_t>(found)].state;
    while (c.tail_dist[static_cast<size_t>(cc)][static_cast<size_t>(s)] > 0) {
      int code = c.tail_next[static_cast<size_t>(cc)][static_cast<size_t>(s)];
      int t2 = code % (nc + 1);
      if (t2 < nc) zp.push_back(t2);
      s = k.step[static_cast<size_t>(s) * k.nsym + code];
    }
    out.h_ball = hbi;
    out.x = hword;
    out.zprime = zp;
  }
  if (successes == 0)
    raise("InconsistentCosetData",
          "no subgroup element carries '" + format_word(c.calpha, cat(z, Word{cc})) +
              "' to the transversal");
  return out;
}

inline CosetFactor cached_factor(const CosetContext& c, const Word& z, int cc) {
  std::lock_guard<std::mutex> lock(c.factor_mutex);
  auto it = c.factor_cache.find({z, cc});
  if (it != c.factor_cache.end()) return it->second;
  CosetFactor f = factorize(c, z, cc);
  c.factor_cache.emplace(std::make_pair(z, cc), f);
  return f;
}

inline Word lift_c(const Word& w, int nb) {
  Word out;
  out.reserve(w.size());
  for (LetterId x : w) out.push_back(x + nb);
  return out;
}

inline Word coset_phi(const CosetContext& c, const Word& y, LetterId a) {
  size_t cut = 0;
  while (cut < y.size() && y[cut] < c.nb) ++cut;
  Word z;
  z.reserve(y.size() - cut);
  for (size_t i = cut; i < y.size(); ++i) {
    if (y[i] < c.nb)
      raise("NotANormalForm", "normal form does not factor as subgroup part "
                              "followed by transversal part");
    z.push_back(y[i] - c.nb);
  }
  if (a < c.nb) {
    if (z.empty()) return phi_eval(c.sub, y, a);
    return lift_c(c.sl_c[static_cast<size_t>(a)], c.nb);
  }
  if ((!y.empty() && y.back() == c.alpha.inverse(a)) || accepts(c.nf, cat(y, Word{a})))
    return Word{a};
  int cc = a - c.nb;
  CosetFactor f = cached_factor(c, z, cc);
  if (static_cast<int>(z.size()) <= c.sk.mu) {
    Word v = invert(c.alpha, lift_c(z, c.nb));
    v.insert(v.end(), f.x.begin(), f.x.end());
    Word zp = lift_c(f.zprime, c.nb);
    v.insert(v.end(), zp.begin(), zp.end());
    return free_reduce(c.alpha, v);
  }
  // long transversal part: replace only a window of radius mu at the far end,
  // using the fixed continuation of the multiplier state reached below it
  size_t j = z.size() - static_cast<size_t>(c.sk.mu) - 1;
  size_t jp = std::min(j, f.zprime.size());
  Word conv = convolve(c.sk.ta, {prefix(z, j), prefix(f.zprime, jp)});
  int s = c.sk.state(c.sk.pair.start, f.h_ball);
  for (LetterId code : conv) s = c.sk.step[static_cast<size_t>(s) * c.sk.nsym + code];
  if (c.live_dist[static_cast<size_t>(cc)][static_cast<size_t>(s)] < 0)
    raise("DeadMultiplierState",
          "multiplier state reached by '" + format_word(c.calpha, prefix(z, j)) +
              "' cannot accept; coset data is inconsistent");
  Word cont;
  while (c.live_dist[static_cast<size_t>(cc)][static_cast<size_t>(s)] > 0) {
    int code = c.live_next[static_cast<size_t>(cc)][static_cast<size_t>(s)];
    cont.push_back(code);
    s = c.sk.step[static_cast<size_t>(s) * c.sk.nsym + code];
  }
  std::vector<Word> vw = deconvolve(c.sk.ta, cont);
  Word out = invert(c.alpha, lift_c(suffix_from(z, j), c.nb));
  Word va = lift_c(vw[0], c.nb);
  out.insert(out.end(), va.begin(), va.end());
  out.push_back(a);
  Word wa = invert(c.alpha, lift_c(vw[1], c.nb));
  out.insert(out.end(), wa.begin(), wa.end());
  Word zrest = lift_c(suffix_from(f.zprime, jp), c.nb);
  out.insert(out.end(), zrest.begin(), zrest.end());
  return out;
}

inline void build_coset_context(CosetContext& c, const AutostackableStructure& sub,
                                const CosetAutomaticData& d) {
  c.sub = sub;
  c.calpha = d.g_alphabet;
  c.nb = sub.alphabet.size();
  c.nc = d.g_alphabet.size();
  for (int j = 0; j < c.nc; ++j)
    if (sub.alphabet.has(d.g_alphabet.name(j)))
      raise("SpecInvariantViolation", "letter '" + d.g_alphabet.name(j) +
                                          "' appears in both alphabets");
  std::vector<std::pair<std::string, std::string>> pairs = sub.alphabet.pairs();
  for (const auto& p : d.g_alphabet.pairs()) pairs.push_back(p);
  c.alpha = Alphabet::from_pairs(pairs);
  for (int i = 0; i < c.nb; ++i)
    if (c.alpha.id(sub.alphabet.name(i)) != i)
      raise("SpecInvariantViolation", "subgroup letters must keep their ids in the composition");
  for (int j = 0; j < c.nc; ++j)
    if (c.alpha.id(d.g_alphabet.name(j)) != c.nb + j)
      raise("SpecInvariantViolation", "coset letters must follow the subgroup letters");
  if (sub.nf.num_symbols != c.nb)
    raise("MalformedAutomaton", "subgroup normal forms are not over the subgroup alphabet");
  if (!accepts(sub.nf, Word{}) || !is_prefix_closed(sub.nf))
    raise("SpecInvariantViolation",
          "subgroup normal forms must be prefix-closed and contain the empty word");
  c.sk = build_skeleton(d);

  int n = c.alpha.size();
  std::vector<int> bmap(static_cast<size_t>(c.nb));
  for (int i = 0; i < c.nb; ++i) bmap[static_cast<size_t>(i)] = i;
  c.h_nf = remap_symbols(sub.nf, n, bmap);
  std::vector<int> cmap(static_cast<size_t>(c.nc));
  for (int j = 0; j < c.nc; ++j) cmap[static_cast<size_t>(j)] = c.nb + j;
  c.tr_nf = remap_symbols(c.sk.tr, n, cmap);
  c.nf = minimize(concat(c.h_nf, c.tr_nf));
  if (!is_prefix_closed(c.nf))
    raise("SpecInvariantViolation", "composed normal forms are not prefix-closed");

  std::vector<char> seen_ball(static_cast<size_t>(c.sk.ball_size), 0);
  bool have_identity = false;
  for (const auto& [key, wstr] : d.subgroup_words) {
    auto it = c.sk.ball_index.find(key);
    if (it == c.sk.ball_index.end())
      raise("SpecInvariantViolation", "subgroup word key '" + key + "' is not in the ball");
    if (seen_ball[static_cast<size_t>(it->second)])
      raise("SpecInvariantViolation", "duplicate subgroup word for key '" + key + "'");
    seen_ball[static_cast<size_t>(it->second)] = 1;
    Word w = parse_word(sub.alphabet, wstr);
    if (!accepts(sub.nf, w))
      raise("SpecInvariantViolation",
            "subgroup word '" + wstr + "' is not a subgroup normal form");
    if (it->second == c.sk.id_ball && !w.empty())
      raise("SpecInvariantViolation", "identity key must carry the empty word");
    if (it->second == c.sk.id_ball) have_identity = true;
    c.sub_words.emplace_back(it->second, w);
  }
  if (!have_identity) c.sub_words.emplace_back(c.sk.id_ball, Word{});

  c.sl_c.resize(static_cast<size_t>(c.nb));
  std::vector<char> have_letter(static_cast<size_t>(c.nb), 0);
  for (const auto& [bname, key] : d.subgroup_letter_keys) {
    int b = sub.alphabet.id(bname);
    if (have_letter[static_cast<size_t>(b)])
      raise("SpecInvariantViolation", "duplicate ball key for subgroup letter '" + bname + "'");
    auto it = c.sk.ball_index.find(key);
    if (it == c.sk.ball_index.end())
      raise("SpecInvariantViolation",
            "key for subgroup letter '" + bname + "' is not in the ball");
    c.sl_c[static_cast<size_t>(b)] =
        shortlex_ball_word(d, c.sk.ball_index, c.sk.id_ball, it->second, bname);
    have_letter[static_cast<size_t>(b)] = 1;
  }
  for (int b = 0; b < c.nb; ++b)
    if (!have_letter[static_cast<size_t>(b)])
      raise("SpecInvariantViolation",
            "no ball key declared for subgroup letter '" + sub.alphabet.name(b) + "'");

  c.live_dist.resize(static_cast<size_t>(c.nc));
  c.live_next.resize(static_cast<size_t>(c.nc));
  c.tail_dist.resize(static_cast<size_t>(c.nc));
  c.tail_next.resize(static_cast<size_t>(c.nc));
  for (int cc = 0; cc < c.nc; ++cc) {
    shortest_to_accept(c.sk, cc, false, c.live_dist[static_cast<size_t>(cc)],
                       c.live_next[static_cast<size_t>(cc)]);
    shortest_to_accept(c.sk, cc, true, c.tail_dist[static_cast<size_t>(cc)],
                       c.tail_next[static_cast<size_t>(cc)]);
  }

  // worst case over the five kinds of flow values: the subgroup stacking, a
  // letter translation, a reduced conjugate with both transversal parts of
  // bounded length, and the windowed long-word value
  int l_h = 0;
  for (const auto& [bi, w] : c.sub_words)
    l_h = std::max(l_h, static_cast<int>(w.size()));
  int bound = std::max(sub.bound, 1);
  for (int b = 0; b < c.nb; ++b)
    bound = std::max(bound, static_cast<int>(c.sl_c[static_cast<size_t>(b)].size()));
  bound = std::max(bound, 3 * c.sk.mu + l_h);
  bound = std::max(bound, 5 * c.sk.mu + 3);
  c.bound = bound;
}

}  // namespace detail

// Multiplier automaton over padded pairs of transversal words: accepts
// (z, z') exactly when z.c and h.z' are the same group element, for h given
// as a ball key and c as a letter name.
inline Fsa build_multiplier(const CosetAutomaticData& data, const std::string& h_key,
                            const std::string& c_letter) {
  detail::MultiplierSkeleton k = detail::build_skeleton(data);
  auto it = k.ball_index.find(h_key);
  if (it == k.ball_index.end())
    raise("SpecInvariantViolation", "element key '" + h_key + "' is not in the ball");
  int c = data.g_alphabet.id(c_letter);
  Fsa m;
  m.num_symbols = k.nsym;
  m.num_states = k.mu;
  m.start = k.state(k.pair.start, it->second);
  m.accepting.assign(static_cast<size_t>(k.mu), 0);
  for (int s = 0; s < k.mu; ++s)
    if (k.accept(s, c)) m.accepting[static_cast<size_t>(s)] = 1;
  m.trans = k.step;
  return m;
}

// Composition along a coset-automatic pair: normal forms are subgroup normal
// forms followed by coset representatives, and the stacking function routes
// subgroup letters to the subgroup structure, translates them across a
// nonempty transversal part, and rewrites coset letters through the
// multiplier automata.
inline RespectingStructure coset_compose(const AutostackableStructure& subgroup,
                                         const CosetAutomaticData& data) {
  auto ctx = std::make_shared<detail::CosetContext>();
  detail::build_coset_context(*ctx, subgroup, data);
  RespectingStructure r;
  r.base.alphabet = ctx->alpha;
  r.base.nf = ctx->nf;
  r.base.bound = ctx->bound;
  r.base.stacking.kind = StackingMap::Kind::Composed;
  r.base.stacking.combinator = "coset";
  r.base.stacking.eval_fn = [ctx](const Word& y, LetterId a) {
    return detail::coset_phi(*ctx, y, a);
  };
  r.base.stacking.recipe_json = coset_spec_to_json(subgroup, data).dump();
  for (int b = 0; b < ctx->nb; ++b) r.subgroup_letters.push_back(b);
  r.nf_h = minimize(ctx->h_nf);
  r.nf_tr = minimize(ctx->tr_nf);
  return r;
}

inline RespectingStructure coset_compose(const CosetSpec& s) {
  return coset_compose(s.subgroup, s.data);
}

// Samples the fellow-traveler property the transversal claims: whenever two
// representatives stay one step apart modulo a subgroup element from the
// ball, their prefixes stay within the declared constant. Distances come
// from an oracle ball around the identity.
inline VerificationReport check_coset_fellow_traveler(
    const CosetAutomaticData& data, const ElementOracle& oracle,
    const std::function<bool(const Word&)>& h_member, const std::vector<Word>& samples,
    const VerifyOptions& opts = {}) {
  CheckResult c;
  c.name = "coset_fellow_traveler";
  const Alphabet& al = data.g_alphabet;
  if (oracle.alphabet.size() != al.size())
    raise("SpecInvariantViolation", "oracle is not over the coset alphabet");
  int kft = std::max(data.fellow_constant, 0);
  Ball ball = ball_enumerate(oracle, std::max(kft, 1));
  std::vector<Word> hs;
  for (int i = 0; i < ball.size(); ++i)
    if (h_member(ball.witnesses[static_cast<size_t>(i)]))
      hs.push_back(ball.witnesses[static_cast<size_t>(i)]);
  std::vector<Word> reps;
  for (const Word& w : samples)
    if (accepts(data.transversal, w)) reps.push_back(w);
  std::unordered_map<std::string, std::vector<size_t>> by_key;
  for (size_t i = 0; i < reps.size(); ++i) by_key[oracle.eval(reps[i])].push_back(i);
  long long pairs_checked = 0;
  for (const Word& v : reps) {
    for (const Word& h : hs) {
      // w with d(v, h w) <= 1 represents h^-1 v u for u empty or a letter
      Word base = cat(invert(al, h), v);
      for (int u = -1; u < al.size(); ++u) {
        Word cand = base;
        if (u >= 0) cand.push_back(u);
        auto hit = by_key.find(oracle.eval(cand));
        if (hit == by_key.end()) continue;
        for (size_t wi : hit->second) {
          const Word& w = reps[wi];
          ++pairs_checked;
          size_t len = std::max(v.size(), w.size());
          for (size_t i = 0; i <= len; ++i) {
            Word pv = prefix(v, std::min(i, v.size()));
            Word pw = prefix(w, std::min(i, w.size()));
            int di = ball.find(oracle.eval(cat(invert(al, pv), h, pw)));
            if (di >= 0 && ball.dist[static_cast<size_t>(di)] <= kft) continue;
            c.passed = false;
            detail::note(c, opts,
                 "prefixes of length " + std::to_string(i) + " of ('" +
                     format_word(al, v) + "', '" + format_word(al, w) + "') with h = '" +
                     format_word(al, h) + "' are more than " + std::to_string(kft) +
                     " apart");
            break;
          }
        }
      }
    }
  }
  c.checked = pairs_checked;
  detail::note(c, opts, "checked " + std::to_string(pairs_checked) + " close pairs");
  VerificationReport rep;
  rep.checks.push_back(c);
  return rep;
}

}  // namespace autostack
