#pragma once

// JSON forms of filters, classifiers, ranking trees and mixture specs.
// Doubles are written with round-trip precision, so load(save(x)) scores
// identically to x.

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ftr/error.hpp"
#include "ftr/filtering.hpp"
#include "ftr/leafrank.hpp"
#include "ftr/synth.hpp"
#include "ftr/treerank.hpp"

namespace ftr {

using Json = nlohmann::json;

namespace detail {

template <class T>
T get_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(Errc::FormatError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::FormatError, std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace detail

// --- FilterIndexSet -------------------------------------------------------

inline Json to_json(const FilterIndexSet& f) {
  bool multi = false;
  for (const auto& i : f.indices) multi |= i.sensor != 0;
  Json idx = Json::array();
  for (const auto& i : f.indices) {
    if (multi)
      idx.push_back({i.sensor, i.j, i.k});
    else
      idx.push_back({i.j, i.k});
  }
  Json j = {{"indices", idx}, {"j0", f.j0}, {"jmax", f.jmax_used}, {"mode", to_string(f.mode)}};
  if (f.family) j["family"] = to_string(*f.family);
  return j;
}

inline FilterIndexSet filter_from_json(const Json& j) {
  FilterIndexSet f;
  f.j0 = detail::get_field<int>(j, "j0");
  f.jmax_used = detail::get_field<int>(j, "jmax");
  f.mode = selection_mode_from_string(detail::get_field<std::string>(j, "mode"));
  if (j.contains("family")) f.family = family_from_string(j.at("family").get<std::string>());
  for (const auto& e : detail::get_field<Json>(j, "indices")) {
    if (!e.is_array() || (e.size() != 2 && e.size() != 3)) throw Error(Errc::FormatError, "malformed filter index");
    WaveletIndex w;
    if (e.size() == 3) {
      w.sensor = e[0].get<int>();
      w.j = e[1].get<int>();
      w.k = e[2].get<std::size_t>();
    } else {
      w.j = e[0].get<int>();
      w.k = e[1].get<std::size_t>();
    }
    f.indices.push_back(w);
  }
  return f;
}

// --- CostSensitiveTree ------------------------------------------------------

inline Json to_json(const CostSensitiveTree& t) {
  const auto& nodes = t.nodes();
  std::function<Json(int)> node = [&](int i) -> Json {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (n.is_leaf()) return Json{{"label", to_int(n.label)}};
    return Json{{"feature", n.feature}, {"threshold", n.threshold}, {"left", node(n.left)}, {"right", node(n.right)}};
  };
  Json j = {{"dimension", t.dimension()}};
  j["root"] = nodes.empty() ? Json{{"label", -1}} : node(0);
  return j;
}

inline CostSensitiveTree classifier_from_json(const Json& j) {
  const auto dim = detail::get_field<std::size_t>(j, "dimension");
  std::vector<CostSensitiveTree::Node> nodes;
  std::function<int(const Json&)> read = [&](const Json& e) -> int {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (e.contains("label")) {
      nodes[static_cast<std::size_t>(id)].label = label_from_int(e.at("label").get<long>());
      return id;
    }
    const int f = detail::get_field<int>(e, "feature");
    if (f < 0 || static_cast<std::size_t>(f) >= dim) throw Error(Errc::FormatError, "classifier feature out of range");
    const double thr = detail::get_field<double>(e, "threshold");
    const int l = read(detail::get_field<Json>(e, "left"));
    const int r = read(detail::get_field<Json>(e, "right"));
    auto& n = nodes[static_cast<std::size_t>(id)];
    n.feature = f;
    n.threshold = thr;
    n.left = l;
    n.right = r;
    return id;
  };
  read(detail::get_field<Json>(j, "root"));
  return CostSensitiveTree(dim, std::move(nodes));
}

// --- RankingTree ------------------------------------------------------------

inline Json to_json(const CoefficientLayout& l) {
  return {{"family", to_string(l.family)},
          {"j0", l.j0},
          {"jmax", l.jmax},
          {"sensors", l.sensors},
          {"coefficient_floor", l.coefficient_floor}};
}

inline CoefficientLayout layout_from_json(const Json& j) {
  CoefficientLayout l;
  l.family = family_from_string(detail::get_field<std::string>(j, "family"));
  l.j0 = detail::get_field<int>(j, "j0");
  l.jmax = detail::get_field<int>(j, "jmax");
  l.sensors = detail::get_field<std::size_t>(j, "sensors");
  l.coefficient_floor = j.value("coefficient_floor", 0.0);
  if (l.j0 < 0 || l.jmax < l.j0 || l.jmax > 30 || l.sensors < 1) throw Error(Errc::FormatError, "invalid layout");
  return l;
}

/// Reachable nodes in preorder, addressed by (d, k).
inline Json to_json(const RankingTree& t) {
  const auto tree = t.compacted();
  Json nodes = Json::array();
  for (const auto& n : tree.nodes) {
    Json e = {{"d", n.d}, {"k", n.k}, {"leaf", n.leaf}, {"n", n.n}, {"n_pos", n.n_pos}, {"omega", n.omega}};
    if (n.leaf) {
      e["rank"] = n.rank;
    } else {
      if (tree.kind == RankingTree::Kind::Functional) e["filter"] = to_json(n.filter);
      e["classifier"] = to_json(n.classifier);
    }
    nodes.push_back(std::move(e));
  }
  Json j = {{"kind", tree.kind == RankingTree::Kind::Functional ? "functional" : "standard"},
            {"input_dim", tree.input_dim},
            {"nodes", nodes}};
  if (tree.layout) j["layout"] = to_json(*tree.layout);
  if (!tree.center.empty()) j["center"] = tree.center;
  return j;
}

inline RankingTree ranking_tree_from_json(const Json& j) {
  RankingTree t;
  const auto kind = detail::get_field<std::string>(j, "kind");
  if (kind == "functional")
    t.kind = RankingTree::Kind::Functional;
  else if (kind == "standard")
    t.kind = RankingTree::Kind::Standard;
  else
    throw Error(Errc::FormatError, "unknown tree kind '" + kind + "'");
  t.input_dim = detail::get_field<std::size_t>(j, "input_dim");
  if (t.kind == RankingTree::Kind::Functional) {
    t.layout = layout_from_json(detail::get_field<Json>(j, "layout"));
    if (t.layout->width() != t.input_dim) throw Error(Errc::FormatError, "layout width differs from input_dim");
  }
  if (j.contains("center")) t.center = j.at("center").get<std::vector<double>>();

  std::map<std::pair<int, std::size_t>, int> at;
  for (const auto& e : detail::get_field<Json>(j, "nodes")) {
    RankNode n;
    n.d = detail::get_field<int>(e, "d");
    n.k = detail::get_field<std::size_t>(e, "k");
    n.leaf = detail::get_field<bool>(e, "leaf");
    n.n = e.value("n", std::size_t{0});
    n.n_pos = e.value("n_pos", std::size_t{0});
    n.omega = e.value("omega", 0.0);
    if (n.leaf) {
      n.rank = detail::get_field<std::size_t>(e, "rank");
    } else {
      n.classifier = classifier_from_json(detail::get_field<Json>(e, "classifier"));
      if (t.kind == RankingTree::Kind::Functional) {
        n.filter = filter_from_json(detail::get_field<Json>(e, "filter"));
        CoefficientTable shape(t.layout->j0, t.layout->jmax, t.layout->sensors);
        n.columns = filter_columns(shape, n.filter);
      } else {
        n.columns = detail::iota_rows(t.input_dim);
      }
      if (n.classifier.dimension() != n.columns.size())
        throw Error(Errc::FormatError, "classifier dimension differs from its filter");
    }
    if (!at.emplace(std::make_pair(n.d, n.k), static_cast<int>(t.nodes.size())).second)
      throw Error(Errc::FormatError, "duplicate node address");
    t.nodes.push_back(std::move(n));
  }
  if (t.nodes.empty() || t.nodes.front().d != 0) throw Error(Errc::FormatError, "tree without a root");
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    auto& n = t.nodes[i];
    if (n.leaf) continue;
    const auto l = at.find({n.d + 1, 2 * n.k});
    const auto r = at.find({n.d + 1, 2 * n.k + 1});
    if (l == at.end() || r == at.end()) throw Error(Errc::FormatError, "inner node without both children");
    n.left = l->second;
    n.right = r->second;
    t.nodes[static_cast<std::size_t>(l->second)].parent = static_cast<int>(i);
    t.nodes[static_cast<std::size_t>(r->second)].parent = static_cast<int>(i);
  }
  const auto stored = [&] {
    std::vector<std::size_t> r;
    for (int i : t.leaves()) r.push_back(t.nodes[static_cast<std::size_t>(i)].rank);
    return r;
  }();
  t.assign_ranks();
  for (std::size_t i = 0; i < stored.size(); ++i)
    if (stored[i] != t.nodes[static_cast<std::size_t>(t.leaves()[i])].rank)
      throw Error(Errc::FormatError, "leaf ranks do not decrease left to right");
  return t;
}

// --- MixtureSpec --------------------------------------------------------------

inline Json to_json(const MixtureSpec& s) {
  Json atoms = Json::array();
  for (const auto& set : s.atoms) {
    Json a = Json::array();
    for (const auto& t : set) a.push_back({t.j, t.l, t.sd});
    atoms.push_back(std::move(a));
  }
  return {{"omega_plus", s.omega_plus}, {"omega_minus", s.omega_minus},
          {"atoms", atoms},             {"family", to_string(s.family)},
          {"length", s.length},         {"j0", s.j0},
          {"p", s.p},                   {"noise_sd", s.noise_sd},
          {"optimal_auc", optimal_auc(s)}};
}

inline MixtureSpec spec_from_json(const Json& j) {
  MixtureSpec s;
  s.omega_plus = detail::get_field<std::vector<double>>(j, "omega_plus");
  s.omega_minus = detail::get_field<std::vector<double>>(j, "omega_minus");
  s.family = family_from_string(detail::get_field<std::string>(j, "family"));
  s.length = detail::get_field<std::size_t>(j, "length");
  s.j0 = detail::get_field<int>(j, "j0");
  s.p = detail::get_field<double>(j, "p");
  s.noise_sd = j.value("noise_sd", 0.0);
  for (const auto& set : detail::get_field<Json>(j, "atoms")) {
    std::vector<Atom> v;
    for (const auto& a : set) v.push_back({a.at(0).get<int>(), a.at(1).get<std::size_t>(), a.at(2).get<double>()});
    s.atoms.push_back(std::move(v));
  }
  s.validate();
  return s;
}

}  // namespace ftr
