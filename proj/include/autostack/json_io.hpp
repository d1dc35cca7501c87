#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "autostack/errors.hpp"
#include "autostack/fsa.hpp"
#include "autostack/rewriting.hpp"
#include "autostack/stacking.hpp"
#include "autostack/words.hpp"

namespace autostack {

using nlohmann::json;

// Alphabets serialize as the letter names in declaration order plus an
// "inverses" table for the pairs that do not follow the name/name^-1
// convention (self-inverse letters, unusual names).
inline json alphabet_to_json(const Alphabet& a) {
  json j;
  j["letters"] = json::array();
  for (int i = 0; i < a.size(); ++i) j["letters"].push_back(a.name(i));
  json irregular = json::object();
  for (int i = 0; i < a.size(); ++i) {
    const std::string& n = a.name(i);
    const std::string& inv = a.name(a.inverse(i));
    std::string conventional =
        n.size() > 3 && n.substr(n.size() - 3) == "^-1" ? n.substr(0, n.size() - 3) : n + "^-1";
    if (inv != conventional) irregular[n] = inv;
  }
  if (!irregular.empty()) j["inverses"] = irregular;
  return j;
}

inline Alphabet alphabet_from_json(const json& j) {
  std::vector<std::pair<std::string, std::string>> ps;
  json irregular = j.contains("inverses") ? j["inverses"] : json::object();
  for (const auto& item : j.at("letters")) {
    std::string n = item.get<std::string>();
    std::string inv;
    if (irregular.contains(n))
      inv = irregular[n].get<std::string>();
    else if (n.size() > 3 && n.substr(n.size() - 3) == "^-1")
      inv = n.substr(0, n.size() - 3);
    else
      inv = n + "^-1";
    ps.emplace_back(n, inv);
  }
  return Alphabet::from_pairs(ps);
}

inline json word_to_json(const Alphabet& a, const Word& w) {
  json j = json::array();
  for (LetterId x : w) j.push_back(a.name(x));
  return j;
}

inline Word word_from_json(const Alphabet& a, const json& j) {
  Word w;
  for (const auto& item : j) w.push_back(a.id(item.get<std::string>()));
  return w;
}

inline json fsa_to_json(const Fsa& m, const std::vector<std::string>& symbol_names) {
  json j;
  j["alphabet"] = symbol_names;
  j["states"] = m.num_states;
  j["start"] = m.start;
  j["accept"] = json::array();
  for (int q = 0; q < m.num_states; ++q)
    if (m.accepting[static_cast<size_t>(q)]) j["accept"].push_back(q);
  j["transitions"] = json::array();
  for (int q = 0; q < m.num_states; ++q)
    for (int s = 0; s < m.num_symbols; ++s)
      j["transitions"].push_back(json::array({q, symbol_names[static_cast<size_t>(s)], m.next(q, s)}));
  return j;
}

inline std::vector<std::string> letter_names(const Alphabet& a) {
  std::vector<std::string> out;
  for (int i = 0; i < a.size(); ++i) out.push_back(a.name(i));
  return out;
}

// Missing transitions fall into an implicit added dead state, so partial
// tables load as complete automata.
inline Fsa fsa_from_json(const json& j, const std::vector<std::string>& symbol_names) {
  std::vector<std::string> names =
      j.contains("alphabet") ? j["alphabet"].get<std::vector<std::string>>() : symbol_names;
  if (names != symbol_names)
    raise("MalformedAutomaton", "automaton alphabet does not match the expected symbol list");
  int declared = j.at("states").get<int>();
  Fsa m;
  m.num_symbols = static_cast<int>(names.size());
  m.num_states = declared + 1;  // + implicit dead
  int dead = declared;
  m.start = j.at("start").get<int>();
  m.accepting.assign(static_cast<size_t>(m.num_states), 0);
  for (const auto& q : j.at("accept")) m.accepting.at(q.get<size_t>()) = 1;
  m.trans.assign(static_cast<size_t>(m.num_states) * m.num_symbols, dead);
  for (const auto& t : j.at("transitions")) {
    int q = t.at(0).get<int>();
    std::string sym = t.at(1).get<std::string>();
    int r = t.at(2).get<int>();
    auto it = std::find(names.begin(), names.end(), sym);
    if (it == names.end()) raise("UnknownLetter", "transition uses unknown symbol '" + sym + "'");
    if (q < 0 || q >= declared || r < 0 || r >= declared)
      raise("MalformedAutomaton", "transition state out of range");
    m.next_ref(q, static_cast<int>(it - names.begin())) = r;
  }
  m.validate();
  return m;
}

inline json rewriting_system_to_json(const RewritingSystem& rs) {
  json j;
  j["alphabet"] = alphabet_to_json(rs.alphabet);
  j["rules"] = json::array();
  for (const Rule& r : rs.rules)
    j["rules"].push_back(json::array(
        {word_to_json(rs.alphabet, r.lhs), word_to_json(rs.alphabet, r.rhs)}));
  return j;
}

inline RewritingSystem rewriting_system_from_json(const json& j) {
  RewritingSystem rs;
  rs.alphabet = alphabet_from_json(j.at("alphabet"));
  for (const auto& r : j.at("rules"))
    rs.rules.push_back({word_from_json(rs.alphabet, r.at(0)), word_from_json(rs.alphabet, r.at(1))});
  rs.validate();
  return rs;
}

inline json stacking_to_json(const Alphabet& a, const StackingMap& st) {
  json j;
  switch (st.kind) {
    case StackingMap::Kind::StateTable: {
      j["kind"] = "state_table";
      j["table"] = json::array();
      int n = a.size();
      int states = static_cast<int>(st.table.size()) / n;
      for (int q = 0; q < states; ++q)
        for (int s = 0; s < n; ++s)
          j["table"].push_back(json::array(
              {q, a.name(s), word_to_json(a, st.table[static_cast<size_t>(q) * n + s])}));
      break;
    }
    case StackingMap::Kind::RewritingDerived:
      j["kind"] = "rewriting";
      j["system"] = rewriting_system_to_json(*st.rules);
      break;
    case StackingMap::Kind::Composed:
      j["kind"] = "composed";
      j["combinator"] = st.combinator;
      j["spec"] = json::parse(st.recipe_json);
      break;
  }
  return j;
}

inline json structure_to_json(const AutostackableStructure& s) {
  json j;
  j["alphabet"] = alphabet_to_json(s.alphabet);
  j["nf"] = fsa_to_json(s.nf, letter_names(s.alphabet));
  j["bound"] = s.bound;
  j["stacking"] = stacking_to_json(s.alphabet, s.stacking);
  return j;
}

inline json respecting_to_json(const RespectingStructure& r) {
  json j;
  j["structure"] = structure_to_json(r.base);
  j["subgroup_letters"] = json::array();
  for (LetterId b : r.subgroup_letters) j["subgroup_letters"].push_back(r.base.alphabet.name(b));
  j["nf_h"] = fsa_to_json(r.nf_h, letter_names(r.base.alphabet));
  j["nf_tr"] = fsa_to_json(r.nf_tr, letter_names(r.base.alphabet));
  return j;
}

// Loads state-table and rewriting-derived structures. Composed structures
// need the combinator dispatch in serialize.hpp (load_structure).
inline AutostackableStructure structure_from_json_leaf(const json& j) {
  AutostackableStructure s;
  s.alphabet = alphabet_from_json(j.at("alphabet"));
  s.nf = fsa_from_json(j.at("nf"), letter_names(s.alphabet));
  s.bound = j.at("bound").get<int>();
  const json& st = j.at("stacking");
  std::string kind = st.at("kind").get<std::string>();
  if (kind == "state_table") {
    s.stacking.kind = StackingMap::Kind::StateTable;
    s.stacking.table.assign(static_cast<size_t>(s.nf.num_states) * s.alphabet.size(), Word{});
    std::vector<char> filled(s.stacking.table.size(), 0);
    for (const auto& e : st.at("table")) {
      int q = e.at(0).get<int>();
      LetterId a = s.alphabet.id(e.at(1).get<std::string>());
      if (q < 0 || q >= s.nf.num_states) raise("MalformedAutomaton", "table state out of range");
      size_t idx = static_cast<size_t>(q) * s.alphabet.size() + static_cast<size_t>(a);
      s.stacking.table[idx] = word_from_json(s.alphabet, e.at(2));
      filled[idx] = 1;
    }
    // unspecified entries behave like tree edges
    int n = s.alphabet.size();
    for (int q = 0; q < s.nf.num_states; ++q)
      for (int a = 0; a < n; ++a) {
        size_t idx = static_cast<size_t>(q) * n + static_cast<size_t>(a);
        if (!filled[idx]) s.stacking.table[idx] = Word{a};
      }
  } else if (kind == "rewriting") {
    s.stacking.kind = StackingMap::Kind::RewritingDerived;
    s.stacking.rules = rewriting_system_from_json(st.at("system"));
    if (s.stacking.rules->alphabet != s.alphabet)
      raise("MalformedAutomaton", "rewriting stacking alphabet differs from structure alphabet");
  } else if (kind == "composed") {
    raise("UseLoadStructure", "composed structures load via load_structure()");
  } else {
    raise("MalformedAutomaton", "unknown stacking kind '" + kind + "'");
  }
  return s;
}

// Callers that understand composed structures pass their own loader;
// everything else defaults to the leaf loader above.
using StructureLoader = std::function<AutostackableStructure(const json&)>;

inline RespectingStructure respecting_from_json(const json& j,
                                                const StructureLoader& load = structure_from_json_leaf) {
  RespectingStructure r;
  r.base = load(j.at("structure"));
  for (const auto& item : j.at("subgroup_letters"))
    r.subgroup_letters.push_back(r.base.alphabet.id(item.get<std::string>()));
  std::sort(r.subgroup_letters.begin(), r.subgroup_letters.end());
  r.nf_h = fsa_from_json(j.at("nf_h"), letter_names(r.base.alphabet));
  r.nf_tr = fsa_from_json(j.at("nf_tr"), letter_names(r.base.alphabet));
  return r;
}

}  // namespace autostack
