#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "autostack/errors.hpp"
#include "autostack/words.hpp"

namespace autostack {

// Independent ground truth for a group: maps a word to a canonical key for
// the element it represents. Keys come from concrete models (integer
// vectors, matrices, affine maps, amalgam normal forms), never from the
// structures under test.
struct ElementOracle {
  Alphabet alphabet;
  std::string name;
  std::function<std::string(const Word&)> eval;
  std::string identity_key;
};

inline bool oracle_trivial(const ElementOracle& o, const Word& w) {
  return o.eval(w) == o.identity_key;
}

inline bool oracle_equal(const ElementOracle& o, const Word& u, const Word& v) {
  return o.eval(u) == o.eval(v);
}

struct Ball {
  int radius = 0;
  std::vector<std::string> keys;   // keys[0] is the identity
  std::vector<Word> witnesses;     // shortlex-least witness per element
  std::vector<int> dist;
  std::unordered_map<std::string, int> index;

  int find(const std::string& k) const {
    auto it = index.find(k);
    return it == index.end() ? -1 : it->second;
  }
  bool contains(const std::string& k) const { return index.count(k) > 0; }
  int size() const { return static_cast<int>(keys.size()); }
};

// Breadth-first enumeration of the ball around the identity; within a layer
// parents are expanded in discovery order and letters in id order, so each
// witness is the shortlex-least word for its element.
inline Ball ball_enumerate(const ElementOracle& o, int radius, size_t max_elements = 2000000) {
  Ball b;
  b.radius = radius;
  b.keys.push_back(o.identity_key);
  b.witnesses.push_back(Word{});
  b.dist.push_back(0);
  b.index[o.identity_key] = 0;
  size_t head = 0;
  while (head < b.keys.size()) {
    size_t cur = head++;
    if (b.dist[cur] == radius) continue;
    for (int a = 0; a < o.alphabet.size(); ++a) {
      Word w = b.witnesses[cur];
      w.push_back(a);
      std::string k = o.eval(w);
      if (b.index.count(k)) continue;
      if (b.keys.size() >= max_elements)
        raise("BallLimitExceeded", "ball enumeration exceeded " + std::to_string(max_elements) +
                                       " elements at radius " + std::to_string(radius));
      b.index[k] = static_cast<int>(b.keys.size());
      b.keys.push_back(k);
      b.witnesses.push_back(w);
      b.dist.push_back(b.dist[cur] + 1);
    }
  }
  return b;
}

namespace detail {

inline std::string join_ll(const std::vector<long long>& v, char sep = ',') {
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) os << sep;
    os << v[i];
  }
  return os.str();
}

}  // namespace detail

// Free abelian group: each base letter is a standard basis vector.
inline ElementOracle integer_vector_oracle(const std::vector<std::string>& base_names) {
  ElementOracle o;
  o.alphabet = Alphabet::with_inverses(base_names);
  o.name = "integer_vector";
  int n = static_cast<int>(base_names.size());
  o.eval = [n](const Word& w) {
    std::vector<long long> v(static_cast<size_t>(n), 0);
    for (LetterId x : w) {
      int i = x / 2;
      v[static_cast<size_t>(i)] += (x % 2 == 0) ? 1 : -1;
    }
    return detail::join_ll(v);
  };
  o.identity_key = o.eval({});
  return o;
}

// Free product of cyclic groups. `orders` lists one letter per inverse pair
// with its order (0 = infinite). Keys are the alternating block normal form.
inline ElementOracle free_product_cyclic_oracle(
    const Alphabet& a, const std::vector<std::pair<std::string, int>>& orders) {
  ElementOracle o;
  o.alphabet = a;
  o.name = "free_product_cyclic";
  std::vector<int> rep(static_cast<size_t>(a.size()), -1);
  std::vector<int> sign(static_cast<size_t>(a.size()), 0);
  std::vector<int> ord(static_cast<size_t>(a.size()), 0);
  for (const auto& [nm, m] : orders) {
    int x = a.id(nm), xi = a.inverse(x);
    if (m < 0 || m == 1) raise("MalformedSystem", "cyclic order must be 0 or at least 2");
    if (x == xi && m != 2)
      raise("MalformedSystem", "self-inverse letter '" + nm + "' must have order 2");
    if (rep[static_cast<size_t>(x)] != -1)
      raise("MalformedSystem", "duplicate order entry for '" + nm + "'");
    rep[static_cast<size_t>(x)] = x;
    sign[static_cast<size_t>(x)] = 1;
    ord[static_cast<size_t>(x)] = m;
    rep[static_cast<size_t>(xi)] = x;
    if (xi != x) sign[static_cast<size_t>(xi)] = -1;
    ord[static_cast<size_t>(xi)] = m;
  }
  for (int x = 0; x < a.size(); ++x)
    if (rep[static_cast<size_t>(x)] == -1)
      raise("MalformedSystem", "no order given for letter '" + a.name(x) + "'");
  auto names = std::make_shared<std::vector<std::string>>();
  for (int x = 0; x < a.size(); ++x) names->push_back(a.name(x));
  o.eval = [rep, sign, ord, names](const Word& w) {
    std::vector<std::pair<int, long long>> blocks;  // (rep letter, exponent != 0)
    for (LetterId x : w) {
      int r = rep[static_cast<size_t>(x)];
      long long s = sign[static_cast<size_t>(x)];
      long long m = ord[static_cast<size_t>(x)];
      if (!blocks.empty() && blocks.back().first == r) {
        long long e = blocks.back().second + s;
        if (m > 0) e = ((e % m) + m) % m;
        if (e == 0)
          blocks.pop_back();
        else
          blocks.back().second = e;
      } else {
        long long e = s;
        if (m > 0) e = ((e % m) + m) % m;
        if (e != 0) blocks.emplace_back(r, e);
      }
    }
    if (blocks.empty()) return std::string("e");
    std::ostringstream os;
    for (size_t i = 0; i < blocks.size(); ++i) {
      if (i) os << '.';
      os << (*names)[static_cast<size_t>(blocks[i].first)] << '^' << blocks[i].second;
    }
    return os.str();
  };
  o.identity_key = "e";
  return o;
}

inline ElementOracle free_group_oracle(const Alphabet& a) {
  std::vector<std::pair<std::string, int>> orders;
  std::vector<char> seen(static_cast<size_t>(a.size()), 0);
  for (int x = 0; x < a.size(); ++x) {
    if (seen[static_cast<size_t>(x)]) continue;
    seen[static_cast<size_t>(x)] = 1;
    seen[static_cast<size_t>(a.inverse(x))] = 1;
    orders.emplace_back(a.name(x), 0);
  }
  ElementOracle o = free_product_cyclic_oracle(a, orders);
  o.name = "free_group";
  return o;
}

// Upper unitriangular 3x3 integer matrices, recorded as the triple
// (x12, x23, x13) with (p,q,r)(p',q',r') = (p+p', q+q', r+r'+p q').
inline ElementOracle unitriangular_oracle(
    const Alphabet& a, const std::vector<std::pair<std::string, std::array<long long, 3>>>& gens) {
  ElementOracle o;
  o.alphabet = a;
  o.name = "unitriangular";
  std::vector<std::array<long long, 3>> val(static_cast<size_t>(a.size()), {0, 0, 0});
  std::vector<char> have(static_cast<size_t>(a.size()), 0);
  for (const auto& [nm, m] : gens) {
    int x = a.id(nm), xi = a.inverse(x);
    val[static_cast<size_t>(x)] = m;
    have[static_cast<size_t>(x)] = 1;
    if (!have[static_cast<size_t>(xi)]) {
      val[static_cast<size_t>(xi)] = {-m[0], -m[1], m[0] * m[1] - m[2]};
      have[static_cast<size_t>(xi)] = 1;
    }
  }
  for (int x = 0; x < a.size(); ++x)
    if (!have[static_cast<size_t>(x)])
      raise("MalformedSystem", "no matrix given for letter '" + a.name(x) + "'");
  o.eval = [val](const Word& w) {
    std::array<long long, 3> g{0, 0, 0};
    for (LetterId x : w) {
      const auto& m = val[static_cast<size_t>(x)];
      g = {g[0] + m[0], g[1] + m[1], g[2] + m[2] + g[0] * m[1]};
    }
    return detail::join_ll({g[0], g[1], g[2]});
  };
  o.identity_key = "0,0,0";
  return o;
}

namespace detail {

using Mat = std::vector<std::vector<long long>>;

inline Mat mat_identity(int n) {
  Mat m(static_cast<size_t>(n), std::vector<long long>(static_cast<size_t>(n), 0));
  for (int i = 0; i < n; ++i) m[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
  return m;
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
  int n = static_cast<int>(a.size());
  Mat c(static_cast<size_t>(n), std::vector<long long>(static_cast<size_t>(n), 0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        c[static_cast<size_t>(i)][static_cast<size_t>(j)] +=
            a[static_cast<size_t>(i)][static_cast<size_t>(k)] *
            b[static_cast<size_t>(k)][static_cast<size_t>(j)];
  return c;
}

inline std::vector<long long> mat_apply(const Mat& a, const std::vector<long long>& v) {
  int n = static_cast<int>(a.size());
  std::vector<long long> r(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r[static_cast<size_t>(i)] +=
          a[static_cast<size_t>(i)][static_cast<size_t>(j)] * v[static_cast<size_t>(j)];
  return r;
}

inline long long mat_det(const Mat& a) {
  int n = static_cast<int>(a.size());
  if (n == 1) return a[0][0];
  long long d = 0;
  for (int c = 0; c < n; ++c) {
    Mat sub;
    for (int i = 1; i < n; ++i) {
      std::vector<long long> row;
      for (int j = 0; j < n; ++j)
        if (j != c) row.push_back(a[static_cast<size_t>(i)][static_cast<size_t>(j)]);
      sub.push_back(row);
    }
    long long term = a[0][static_cast<size_t>(c)] * mat_det(sub);
    d += (c % 2 == 0) ? term : -term;
  }
  return d;
}

// Inverse of a matrix in GL(n, Z) via the adjugate; requires det = +-1.
inline Mat mat_inv_unimodular(const Mat& a) {
  int n = static_cast<int>(a.size());
  long long d = mat_det(a);
  if (d != 1 && d != -1)
    raise("MalformedSystem", "matrix must have determinant +1 or -1 to invert over Z");
  Mat inv(static_cast<size_t>(n), std::vector<long long>(static_cast<size_t>(n), 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat sub;
      for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        std::vector<long long> row;
        for (int c = 0; c < n; ++c)
          if (c != j) row.push_back(a[static_cast<size_t>(r)][static_cast<size_t>(c)]);
        sub.push_back(row);
      }
      long long cof = (n == 1) ? 1 : mat_det(sub);
      if ((i + j) % 2) cof = -cof;
      inv[static_cast<size_t>(j)][static_cast<size_t>(i)] = cof * d;  // d = 1/d here
    }
  return inv;
}

}  // namespace detail

// Semidirect products Z^n x| Z: elements are pairs (v, k) with
// (v,k)(w,d) = (v + A^k w, k + d). When k_mod > 0 the twisting exponent is
// reduced mod k_mod (A^k_mod must be the identity). Each listed generator
// carries its (vector, exponent) pair; inverses are derived.
inline ElementOracle affine_oracle(
    const Alphabet& a, const detail::Mat& A, int k_mod,
    const std::vector<std::pair<std::string, std::pair<std::vector<long long>, long long>>>& gens) {
  ElementOracle o;
  o.alphabet = a;
  o.name = "affine";
  int n = static_cast<int>(A.size());
  detail::Mat Ainv = detail::mat_inv_unimodular(A);
  if (k_mod > 0) {
    detail::Mat p = detail::mat_identity(n);
    for (int i = 0; i < k_mod; ++i) p = detail::mat_mul(p, A);
    if (p != detail::mat_identity(n))
      raise("MalformedSystem", "A^k_mod must be the identity when k_mod > 0");
  }
  auto powA = [A, Ainv, n](long long k) {
    detail::Mat p = detail::mat_identity(n);
    const detail::Mat& base = k >= 0 ? A : Ainv;
    for (long long i = 0; i < (k >= 0 ? k : -k); ++i) p = detail::mat_mul(p, base);
    return p;
  };
  std::vector<std::pair<std::vector<long long>, long long>> val(
      static_cast<size_t>(a.size()), {std::vector<long long>(static_cast<size_t>(n), 0), 0});
  std::vector<char> have(static_cast<size_t>(a.size()), 0);
  for (const auto& [nm, g] : gens) {
    int x = a.id(nm), xi = a.inverse(x);
    if (static_cast<int>(g.first.size()) != n)
      raise("MalformedSystem", "generator vector has wrong dimension");
    val[static_cast<size_t>(x)] = g;
    have[static_cast<size_t>(x)] = 1;
    if (!have[static_cast<size_t>(xi)]) {
      auto neg = detail::mat_apply(powA(-g.second), g.first);
      for (auto& c : neg) c = -c;
      val[static_cast<size_t>(xi)] = {neg, -g.second};
      have[static_cast<size_t>(xi)] = 1;
    }
  }
  for (int x = 0; x < a.size(); ++x)
    if (!have[static_cast<size_t>(x)])
      raise("MalformedSystem", "no affine value given for letter '" + a.name(x) + "'");
  o.eval = [val, powA, k_mod, n](const Word& w) {
    std::vector<long long> v(static_cast<size_t>(n), 0);
    long long k = 0;
    for (LetterId x : w) {
      const auto& g = val[static_cast<size_t>(x)];
      auto t = detail::mat_apply(powA(k), g.first);
      for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] += t[static_cast<size_t>(i)];
      k += g.second;
      if (k_mod > 0) k = ((k % k_mod) + k_mod) % k_mod;
    }
    return detail::join_ll(v) + ";" + std::to_string(k);
  };
  std::vector<long long> zero(static_cast<size_t>(n), 0);
  o.identity_key = detail::join_ll(zero) + ";0";
  return o;
}

// Torus knot group <x, y | x^p = y^q>. The subgroup generated by z = x^p is
// central with infinite cyclic quotient kernel: G / <z> = Z/p * Z/q, so an
// element is determined by its image in the free product together with the
// exponent of z, recovered from the weighted exponent sum (weight q on x,
// weight p on y, pq on the stable letters X = x^p and Y = y^q).
inline ElementOracle torus_knot_oracle(const Alphabet& a, int p, int q,
                                       const std::string& x_name, const std::string& y_name,
                                       const std::string& X_name, const std::string& Y_name) {
  ElementOracle o;
  o.alphabet = a;
  o.name = "torus_knot";
  if (p < 2 || q < 2) raise("MalformedSystem", "torus knot exponents must be at least 2");
  int x = a.id(x_name), y = a.id(y_name), X = a.id(X_name), Y = a.id(Y_name);
  int xi = a.inverse(x), yi = a.inverse(y), Xi = a.inverse(X), Yi = a.inverse(Y);
  long long pq = static_cast<long long>(p) * q;
  // per letter: contribution to the quotient (side 0 = x, 1 = y, -1 = none),
  // signed, and to the weighted exponent sum
  std::vector<int> side(static_cast<size_t>(a.size()), -1);
  std::vector<long long> step(static_cast<size_t>(a.size()), 0);
  std::vector<long long> weight(static_cast<size_t>(a.size()), 0);
  side[static_cast<size_t>(x)] = 0;
  step[static_cast<size_t>(x)] = 1;
  weight[static_cast<size_t>(x)] = q;
  side[static_cast<size_t>(xi)] = 0;
  step[static_cast<size_t>(xi)] = -1;
  weight[static_cast<size_t>(xi)] = -q;
  side[static_cast<size_t>(y)] = 1;
  step[static_cast<size_t>(y)] = 1;
  weight[static_cast<size_t>(y)] = p;
  side[static_cast<size_t>(yi)] = 1;
  step[static_cast<size_t>(yi)] = -1;
  weight[static_cast<size_t>(yi)] = -p;
  weight[static_cast<size_t>(X)] = pq;
  weight[static_cast<size_t>(Xi)] = -pq;
  weight[static_cast<size_t>(Y)] = pq;
  weight[static_cast<size_t>(Yi)] = -pq;
  long long mods[2] = {static_cast<long long>(p), static_cast<long long>(q)};
  o.eval = [side, step, weight, mods, pq](const Word& w) {
    std::vector<std::pair<int, long long>> blocks;
    long long esum = 0;
    for (LetterId l : w) {
      esum += weight[static_cast<size_t>(l)];
      int s = side[static_cast<size_t>(l)];
      if (s < 0) continue;
      long long m = mods[s];
      if (!blocks.empty() && blocks.back().first == s) {
        long long e = (((blocks.back().second + step[static_cast<size_t>(l)]) % m) + m) % m;
        if (e == 0)
          blocks.pop_back();
        else
          blocks.back().second = e;
      } else {
        long long e = ((step[static_cast<size_t>(l)] % m) + m) % m;
        if (e != 0) blocks.emplace_back(s, e);
      }
    }
    long long e0 = 0;
    std::ostringstream os;
    for (size_t i = 0; i < blocks.size(); ++i) {
      e0 += blocks[i].second * (blocks[i].first == 0 ? mods[1] : mods[0]);
      if (i) os << '.';
      os << (blocks[i].first == 0 ? 'x' : 'y') << '^' << blocks[i].second;
    }
    long long k = (esum - e0) / pq;
    std::string img = blocks.empty() ? "e" : os.str();
    return img + "|" + std::to_string(k);
  };
  o.identity_key = "e|0";
  return o;
}

// Amalgam of the integer Heisenberg group and the Klein bottle group over a
// common Z^2, the fundamental group of the simplest graph manifold gluing a
// nil piece to a twisted circle bundle. Canonical form: alternating left
// coset representatives followed by an edge-group tail, folded on the fly.
//
// Letters: a, b, c generate Heisenberg (keys (p,q,r), edge subgroup q = 0,
// edge pair (s,u) = a^s c^u); p_name, t generate the Klein bottle group with
// X = t^2 (affine keys (v,k), A = [-1], edge subgroup k even, a^s c^u = p^s X^u).
inline ElementOracle graph_manifold_amalgam_oracle(const Alphabet& alpha, const std::string& a_name,
                                                   const std::string& b_name, const std::string& c_name,
                                                   const std::string& p_name, const std::string& X_name,
                                                   const std::string& t_name) {
  ElementOracle o;
  o.alphabet = alpha;
  o.name = "graph_manifold_amalgam";

  struct LetterVal {
    int side;  // 0 = Heisenberg, 1 = Klein bottle
    std::array<long long, 3> v;
  };
  std::vector<LetterVal> val(static_cast<size_t>(alpha.size()), {0, {0, 0, 0}});
  auto seth = [&](const std::string& nm, std::array<long long, 3> m) {
    int x = alpha.id(nm);
    val[static_cast<size_t>(x)] = {0, m};
    val[static_cast<size_t>(alpha.inverse(x))] = {0, {-m[0], -m[1], m[0] * m[1] - m[2]}};
  };
  auto setk = [&](const std::string& nm, long long v0, long long k) {
    int x = alpha.id(nm);
    val[static_cast<size_t>(x)] = {1, {v0, k, 0}};
    long long sgn = (k % 2 == 0) ? 1 : -1;  // A^{-k} = A^k for A = [-1]
    val[static_cast<size_t>(alpha.inverse(x))] = {1, {-sgn * v0, -k, 0}};
  };
  seth(a_name, {1, 0, 0});
  seth(b_name, {0, 1, 0});
  seth(c_name, {0, 0, 1});
  setk(p_name, 1, 0);
  setk(X_name, 0, 2);
  setk(t_name, 0, 1);

  o.eval = [val](const Word& w) {
    struct Block {
      int side;
      std::array<long long, 3> key;
    };
    std::vector<Block> blocks;
    std::array<long long, 2> tail{0, 0};  // edge element a^s c^u

    auto hmul = [](std::array<long long, 3> g, std::array<long long, 3> h) {
      return std::array<long long, 3>{g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]};
    };
    auto kmul = [](std::array<long long, 3> g, std::array<long long, 3> h) {
      long long sgn = (g[1] % 2 == 0) ? 1 : -1;
      return std::array<long long, 3>{g[0] + sgn * h[0], g[1] + h[1], 0};
    };

    for (LetterId l : w) {
      const LetterVal& lv = val[static_cast<size_t>(l)];
      std::array<long long, 3> t;
      if (lv.side == 0)
        t = hmul({tail[0], 0, tail[1]}, lv.v);
      else
        t = kmul({tail[0], 2 * tail[1], 0}, lv.v);
      if (!blocks.empty() && blocks.back().side == lv.side) {
        t = lv.side == 0 ? hmul(blocks.back().key, t) : kmul(blocks.back().key, t);
        blocks.pop_back();
      }
      if (lv.side == 0) {
        if (t[1] == 0) {
          tail = {t[0], t[2]};
        } else {
          // (p,q,r) = (0,q,0) * (p,0,r)
          blocks.push_back({0, {0, t[1], 0}});
          tail = {t[0], t[2]};
        }
      } else {
        if (t[1] % 2 == 0) {
          tail = {t[0], t[1] / 2};
        } else {
          // (v,k) = (0,1) * (-v, k-1)
          blocks.push_back({1, {0, 1, 0}});
          tail = {-t[0], (t[1] - 1) / 2};
        }
      }
    }
    std::ostringstream os;
    for (const Block& b : blocks) {
      os << (b.side == 0 ? 'H' : 'K');
      if (b.side == 0)
        os << b.key[1];  // rep (0,q,0)
      os << '|';
    }
    os << tail[0] << ',' << tail[1];
    return os.str();
  };
  o.identity_key = "0,0";
  return o;
}

}  // namespace autostack
