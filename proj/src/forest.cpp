#include "graphadv/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "graphadv/errors.hpp"
#include "graphadv/rng.hpp"
#include "json.hpp"

namespace graphadv {

const std::vector<double>& DecisionTree::leaf(const std::vector<double>& x) const {
  int n = 0;
  while (feature[n] >= 0) n = x[feature[n]] <= threshold[n] ? left[n] : right[n];
  return value[n];
}

std::vector<double> ForestModel::predict_proba(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != num_features)
    throw std::invalid_argument("predict_proba: expected " + std::to_string(num_features) + " features, got " +
                                std::to_string(x.size()));
  std::vector<double> p(classes.size(), 0.0);
  for (const auto& t : trees) {
    const auto& v = t.leaf(x);
    for (std::size_t c = 0; c < p.size(); ++c) p[c] += v[c];
  }
  if (!trees.empty())
    for (double& q : p) q /= static_cast<double>(trees.size());
  return p;
}

std::string ForestModel::predict(const std::vector<double>& x) const {
  auto p = predict_proba(x);
  return classes[std::max_element(p.begin(), p.end()) - p.begin()];
}

int ForestModel::class_index(const std::string& cls) const {
  auto it = std::find(classes.begin(), classes.end(), cls);
  return it == classes.end() ? -1 : static_cast<int>(it - classes.begin());
}

double ForestModel::probability_of(const std::vector<double>& x, const std::string& cls) const {
  int i = class_index(cls);
  return i < 0 ? 0.0 : predict_proba(x)[i];
}

namespace {

struct Builder {
  const std::vector<std::vector<double>>& x;
  const std::vector<int>& y;
  int num_classes;
  int num_features;
  ForestParams params;
  int mtry;
  Rng rng;
  DecisionTree tree;

  std::vector<double> distribution(const std::vector<int>& idx) const {
    std::vector<double> d(num_classes, 0.0);
    for (int i : idx) d[y[i]] += 1.0;
    for (double& v : d) v /= static_cast<double>(idx.size());
    return d;
  }

  int make_leaf(const std::vector<int>& idx) {
    tree.feature.push_back(-1);
    tree.threshold.push_back(0.0);
    tree.left.push_back(-1);
    tree.right.push_back(-1);
    tree.value.push_back(distribution(idx));
    return static_cast<int>(tree.feature.size()) - 1;
  }

  int build(std::vector<int> idx, int depth) {
    const auto n = static_cast<int>(idx.size());
    std::vector<double> counts(num_classes, 0.0);
    for (int i : idx) counts[y[i]] += 1.0;
    const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;
    if (pure || n < 2 * params.min_leaf || (params.max_depth > 0 && depth >= params.max_depth)) return make_leaf(idx);

    auto gini_sum = [&](const std::vector<double>& c, double total) {
      double s = 0.0;
      for (double v : c) s += v * v;
      return total - s / total;  // total · Gini impurity
    };
    const double parent = gini_sum(counts, n);

    std::vector<int> features(num_features);
    std::iota(features.begin(), features.end(), 0);
    rng.shuffle(features.begin(), features.end());

    int best_f = -1;
    double best_t = 0.0, best_score = parent - 1e-12;
    int tried = 0;
    std::vector<int> order(idx);
    for (int f : features) {
      if (tried >= mtry) break;
      std::sort(order.begin(), order.end(), [&](int a, int b) { return x[a][f] < x[b][f]; });
      if (x[order.front()][f] == x[order.back()][f]) continue;  // constant here
      ++tried;
      std::vector<double> lc(num_classes, 0.0), rc = counts;
      for (int i = 0; i + 1 < n; ++i) {
        lc[y[order[i]]] += 1.0;
        rc[y[order[i]]] -= 1.0;
        const double a = x[order[i]][f], b = x[order[i + 1]][f];
        if (a == b) continue;
        const int nl = i + 1, nr = n - nl;
        if (nl < params.min_leaf || nr < params.min_leaf) continue;
        const double score = gini_sum(lc, nl) + gini_sum(rc, nr);
        if (score < best_score) {
          best_score = score;
          best_f = f;
          best_t = a + (b - a) / 2.0;
        }
      }
    }
    if (best_f < 0) return make_leaf(idx);

    std::vector<int> li, ri;
    for (int i : idx) (x[i][best_f] <= best_t ? li : ri).push_back(i);
    const int node = static_cast<int>(tree.feature.size());
    tree.feature.push_back(best_f);
    tree.threshold.push_back(best_t);
    tree.left.push_back(-1);
    tree.right.push_back(-1);
    tree.value.emplace_back();
    const int l = build(std::move(li), depth + 1);
    const int r = build(std::move(ri), depth + 1);
    tree.left[node] = l;
    tree.right[node] = r;
    return node;
  }
};

}  // namespace

ForestModel train_forest(const std::vector<std::vector<double>>& x, const std::vector<std::string>& y,
                         const ForestParams& params, std::uint64_t seed) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("train_forest: need matching non-empty x and y");
  std::map<std::string, int> per_class;
  for (const auto& c : y) ++per_class[c];
  if (per_class.size() < 2) throw std::invalid_argument("train_forest: need at least 2 classes");
  for (const auto& [c, n] : per_class)
    if (n < 2) throw std::invalid_argument("train_forest: class '" + c + "' has fewer than 2 samples");
  const int d = static_cast<int>(x.front().size());
  for (const auto& row : x)
    if (static_cast<int>(row.size()) != d) throw std::invalid_argument("train_forest: ragged feature rows");

  ForestModel m;
  for (const auto& [c, n] : per_class) m.classes.push_back(c);
  m.params = params;
  m.seed = seed;
  m.num_features = d;
  m.train_x = x;
  m.train_y = y;

  std::vector<int> yi(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) yi[i] = m.class_index(y[i]);
  const int mtry = params.mtry > 0 ? std::min(params.mtry, d)
                                   : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(d)))));
  Rng root(derive_seed(seed, "forest"));
  for (int t = 0; t < params.trees; ++t) {
    Builder b{x, yi, static_cast<int>(m.classes.size()), d, params, mtry, root.split(static_cast<std::uint64_t>(t)), {}};
    std::vector<int> boot(x.size());
    for (int& i : boot) i = static_cast<int>(b.rng.uniform(x.size()));
    b.build(std::move(boot), 0);
    m.trees.push_back(std::move(b.tree));
  }
  return m;
}

std::string ForestModel::to_json() const {
  nlohmann::json j;
  j["format"] = "graphadv-forest";
  j["version"] = kVersion;
  j["classes"] = classes;
  j["num_features"] = num_features;
  j["seed"] = seed;
  j["params"] = {{"trees", params.trees}, {"max_depth", params.max_depth}, {"min_leaf", params.min_leaf},
                 {"mtry", params.mtry}};
  auto& jt = j["trees"] = nlohmann::json::array();
  for (const auto& t : trees)
    jt.push_back({{"feature", t.feature},
                  {"threshold", t.threshold},
                  {"left", t.left},
                  {"right", t.right},
                  {"value", t.value}});
  j["training"] = {{"features", train_x}, {"labels", train_y}};
  return j.dump();
}

ForestModel ForestModel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model: ") + e.what());
  }
  if (j.value("format", "") != "graphadv-forest") throw DataError("model: not a graphadv forest file");
  if (j.value("version", 0) != kVersion)
    throw DataError("model: unsupported version " + std::to_string(j.value("version", 0)));
  try {
    ForestModel m;
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.num_features = j.at("num_features").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto& p = j.at("params");
    m.params = {p.at("trees").get<int>(), p.at("max_depth").get<int>(), p.at("min_leaf").get<int>(),
                p.at("mtry").get<int>()};
    for (const auto& jt : j.at("trees")) {
      DecisionTree t;
      t.feature = jt.at("feature").get<std::vector<int>>();
      t.threshold = jt.at("threshold").get<std::vector<double>>();
      t.left = jt.at("left").get<std::vector<int>>();
      t.right = jt.at("right").get<std::vector<int>>();
      t.value = jt.at("value").get<std::vector<std::vector<double>>>();
      m.trees.push_back(std::move(t));
    }
    m.train_x = j.at("training").at("features").get<std::vector<std::vector<double>>>();
    m.train_y = j.at("training").at("labels").get<std::vector<std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model: ") + e.what());
  }
}

void ForestModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model " + path.string());
  out << to_json() << '\n';
}

ForestModel ForestModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace graphadv
