#pragma once

#include <map>
#include <string>
#include <vector>

#include "autostack/errors.hpp"
#include "autostack/fsa.hpp"
#include "autostack/words.hpp"

namespace autostack {

// Alphabet of n-tuples over component alphabets extended by a padding symbol
// $, excluding the all-$ tuple. Tuples are encoded in mixed radix with digit
// comp_sizes[i] playing $; the all-$ tuple would be the largest code, so valid
// codes are exactly 0..num_symbols()-1.
struct TupleAlphabet {
  std::vector<int> comp_sizes;

  explicit TupleAlphabet(std::vector<int> sizes = {}) : comp_sizes(std::move(sizes)) {}

  int arity() const { return static_cast<int>(comp_sizes.size()); }

  int pad_digit(int comp) const { return comp_sizes[static_cast<size_t>(comp)]; }

  int num_symbols() const {
    long long total = 1;
    for (int s : comp_sizes) total *= s + 1;
    return static_cast<int>(total - 1);
  }

  int encode(const std::vector<int>& digits) const {
    if (static_cast<int>(digits.size()) != arity())
      raise("MalformedPadding", "tuple digit count does not match arity");
    long long code = 0;
    bool all_pad = true;
    for (int i = 0; i < arity(); ++i) {
      int d = digits[static_cast<size_t>(i)];
      if (d < 0 || d > pad_digit(i)) raise("MalformedPadding", "tuple digit out of range");
      if (d != pad_digit(i)) all_pad = false;
      code = code * (comp_sizes[static_cast<size_t>(i)] + 1) + d;
    }
    if (all_pad) raise("MalformedPadding", "the all-padding tuple is not a symbol");
    return static_cast<int>(code);
  }

  std::vector<int> decode(int code) const {
    std::vector<int> digits(static_cast<size_t>(arity()));
    for (int i = arity() - 1; i >= 0; --i) {
      int base = comp_sizes[static_cast<size_t>(i)] + 1;
      digits[static_cast<size_t>(i)] = code % base;
      code /= base;
    }
    return digits;
  }

  std::string symbol_name(int code, const std::vector<std::vector<std::string>>& comp_names) const {
    auto d = decode(code);
    std::string out = "(";
    for (int i = 0; i < arity(); ++i) {
      if (i) out += ",";
      out += d[static_cast<size_t>(i)] == pad_digit(i)
                 ? "$"
                 : comp_names[static_cast<size_t>(i)][static_cast<size_t>(d[static_cast<size_t>(i)])];
    }
    return out + ")";
  }

  std::vector<std::string> all_symbol_names(const std::vector<std::vector<std::string>>& comp_names) const {
    std::vector<std::string> out;
    for (int c = 0; c < num_symbols(); ++c) out.push_back(symbol_name(c, comp_names));
    return out;
  }
};

// Padded word of a word tuple: component i reads words[i] then $.
inline Word convolve(const TupleAlphabet& ta, const std::vector<Word>& words) {
  if (static_cast<int>(words.size()) != ta.arity())
    raise("MalformedPadding", "word count does not match tuple arity");
  size_t len = 0;
  for (const Word& w : words) len = std::max(len, w.size());
  Word out;
  out.reserve(len);
  for (size_t p = 0; p < len; ++p) {
    std::vector<int> digits(static_cast<size_t>(ta.arity()));
    for (int i = 0; i < ta.arity(); ++i) {
      const Word& w = words[static_cast<size_t>(i)];
      digits[static_cast<size_t>(i)] = p < w.size() ? w[p] : ta.pad_digit(i);
    }
    out.push_back(ta.encode(digits));
  }
  return out;
}

// Inverse of convolve; rejects words where a component resumes after padding.
inline std::vector<Word> deconvolve(const TupleAlphabet& ta, const Word& padded) {
  std::vector<Word> out(static_cast<size_t>(ta.arity()));
  std::vector<char> finished(static_cast<size_t>(ta.arity()), 0);
  for (LetterId code : padded) {
    if (code < 0 || code >= ta.num_symbols()) raise("MalformedPadding", "tuple symbol out of range");
    auto d = ta.decode(code);
    for (int i = 0; i < ta.arity(); ++i) {
      if (d[static_cast<size_t>(i)] == ta.pad_digit(i)) {
        finished[static_cast<size_t>(i)] = 1;
      } else {
        if (finished[static_cast<size_t>(i)])
          raise("MalformedPadding", "component resumes after padding");
        out[static_cast<size_t>(i)].push_back(d[static_cast<size_t>(i)]);
      }
    }
  }
  return out;
}

// Synchronous product: accepts conv(w_0..w_{n-1}) iff each component accepts
// its word. Malformed paddings land in a sink. Component state -1 records
// "finished while accepting".
inline Fsa product(const TupleAlphabet& ta, const std::vector<const Fsa*>& comps) {
  if (static_cast<int>(comps.size()) != ta.arity())
    raise("MalformedAutomaton", "component count does not match tuple arity");
  for (int i = 0; i < ta.arity(); ++i)
    if (comps[static_cast<size_t>(i)]->num_symbols != ta.comp_sizes[static_cast<size_t>(i)])
      raise("MalformedAutomaton", "component alphabet size mismatch in product");
  std::map<std::vector<int>, int> id;
  std::vector<std::vector<int>> states;
  auto intern = [&](const std::vector<int>& v) {
    auto it = id.find(v);
    if (it != id.end()) return it->second;
    int n = static_cast<int>(states.size());
    id[v] = n;
    states.push_back(v);
    return n;
  };
  const std::vector<int> dead_key;  // empty vector marks the sink
  Fsa out;
  out.num_symbols = ta.num_symbols();
  std::vector<int> init;
  for (const Fsa* c : comps) init.push_back(c->start);
  out.start = intern(init);
  for (size_t i = 0; i < states.size(); ++i) {
    std::vector<int> cur = states[i];
    for (int code = 0; code < ta.num_symbols(); ++code) {
      if (cur.empty()) {
        intern(dead_key);
        continue;
      }
      auto d = ta.decode(code);
      std::vector<int> nxt = cur;
      bool dead = false;
      for (int c = 0; c < ta.arity() && !dead; ++c) {
        const Fsa& comp = *comps[static_cast<size_t>(c)];
        int q = cur[static_cast<size_t>(c)];
        if (d[static_cast<size_t>(c)] == ta.pad_digit(c)) {
          if (q == -1) continue;
          if (comp.accepting[static_cast<size_t>(q)])
            nxt[static_cast<size_t>(c)] = -1;
          else
            dead = true;
        } else {
          if (q == -1)
            dead = true;
          else
            nxt[static_cast<size_t>(c)] = comp.next(q, d[static_cast<size_t>(c)]);
        }
      }
      intern(dead ? dead_key : nxt);
    }
  }
  out.num_states = static_cast<int>(states.size());
  out.accepting.resize(states.size());
  out.trans.resize(states.size() * static_cast<size_t>(out.num_symbols));
  for (size_t i = 0; i < states.size(); ++i) {
    const std::vector<int>& cur = states[i];
    bool acc = !cur.empty();
    for (int c = 0; c < ta.arity() && acc; ++c) {
      int q = cur[static_cast<size_t>(c)];
      if (q != -1 && !comps[static_cast<size_t>(c)]->accepting[static_cast<size_t>(q)]) acc = false;
    }
    out.accepting[i] = acc ? 1 : 0;
    for (int code = 0; code < ta.num_symbols(); ++code) {
      if (cur.empty()) {
        out.trans[i * static_cast<size_t>(out.num_symbols) + code] = static_cast<int>(i);
        continue;
      }
      auto d = ta.decode(code);
      std::vector<int> nxt = cur;
      bool dead = false;
      for (int c = 0; c < ta.arity() && !dead; ++c) {
        const Fsa& comp = *comps[static_cast<size_t>(c)];
        int q = cur[static_cast<size_t>(c)];
        if (d[static_cast<size_t>(c)] == ta.pad_digit(c)) {
          if (q == -1) continue;
          if (comp.accepting[static_cast<size_t>(q)])
            nxt[static_cast<size_t>(c)] = -1;
          else
            dead = true;
        } else {
          if (q == -1)
            dead = true;
          else
            nxt[static_cast<size_t>(c)] = comp.next(q, d[static_cast<size_t>(c)]);
        }
      }
      out.trans[i * static_cast<size_t>(out.num_symbols) + code] = id[dead ? dead_key : nxt];
    }
  }
  return out;
}

inline Fsa product(const TupleAlphabet& ta, const Fsa& a, const Fsa& b) {
  return product(ta, std::vector<const Fsa*>{&a, &b});
}

inline Fsa product(const TupleAlphabet& ta, const Fsa& a, const Fsa& b, const Fsa& c) {
  return product(ta, std::vector<const Fsa*>{&a, &b, &c});
}

// Erase all tapes but `comp`: the image of the tuple language under the
// letter map (d_0..d_{n-1}) -> d_comp (or nothing when $).
inline Fsa projection(const TupleAlphabet& ta, const Fsa& m, int comp) {
  if (m.num_symbols != ta.num_symbols())
    raise("MalformedAutomaton", "projection input is not over the tuple alphabet");
  std::vector<Word> images;
  for (int code = 0; code < ta.num_symbols(); ++code) {
    auto d = ta.decode(code);
    if (d[static_cast<size_t>(comp)] == ta.pad_digit(comp))
      images.push_back({});
    else
      images.push_back({d[static_cast<size_t>(comp)]});
  }
  return hom_image(m, ta.comp_sizes[static_cast<size_t>(comp)], images);
}

}  // namespace autostack
