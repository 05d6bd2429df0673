#include "skillminer/quality_model.h"

#include <algorithm>
#include <functional>
#include <numeric>

#include <json.hpp>

#include "skillminer/common.h"

namespace skillminer {

using json = nlohmann::json;

namespace {

double gini(double pos, double total) {
  if (total <= 0) return 0;
  double p = pos / total;
  return 2 * p * (1 - p);
}

class TreeBuilder {
 public:
  TreeBuilder(std::span<const FeatureVector> rows, std::span<const int> labels,
              int max_depth)
      : rows_(rows), labels_(labels), max_depth_(max_depth) {}

  int build(std::vector<size_t> &idx, int depth) {
    const int node_id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double pos = 0;
    for (size_t i : idx) pos += labels_[i];
    const double total = static_cast<double>(idx.size());
    nodes_[node_id].positive_fraction = total > 0 ? pos / total : 0;
    if (depth >= max_depth_ || idx.size() < 2 || pos == 0 || pos == total) {
      return node_id;
    }

    const double parent = gini(pos, total);
    double best_impurity = parent;
    int best_feature = -1;
    double best_threshold = 0;
    std::vector<size_t> order(idx);
    for (size_t f = 0; f < kNumPhraseFeatures; ++f) {
      std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return rows_[a][f] < rows_[b][f];
      });
      double left_pos = 0;
      for (size_t k = 0; k + 1 < order.size(); ++k) {
        left_pos += labels_[order[k]];
        double here = rows_[order[k]][f];
        double next = rows_[order[k + 1]][f];
        if (!(here < next)) continue;
        double left_n = static_cast<double>(k + 1);
        double right_n = total - left_n;
        double impurity = (left_n * gini(left_pos, left_n) +
                           right_n * gini(pos - left_pos, right_n)) /
                          total;
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best_feature = static_cast<int>(f);
          best_threshold = here + (next - here) / 2;
          // Midpoint of adjacent doubles can round onto `next`.
          if (!(best_threshold < next)) best_threshold = here;
        }
      }
    }
    if (best_feature < 0) return node_id;

    std::vector<size_t> left, right;
    for (size_t i : idx) {
      (rows_[i][best_feature] <= best_threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    nodes_[node_id].feature = best_feature;
    nodes_[node_id].threshold = best_threshold;
    int l = build(left, depth + 1);
    nodes_[node_id].left = l;
    int r = build(right, depth + 1);
    nodes_[node_id].right = r;
    return node_id;
  }

  std::vector<TreeNode> take() { return std::move(nodes_); }

 private:
  std::span<const FeatureVector> rows_;
  std::span<const int> labels_;
  int max_depth_;
  std::vector<TreeNode> nodes_;
};

struct Pools {
  std::vector<size_t> positive;
  std::vector<size_t> negative;
};

Pools split_pools(std::span<const int> labels) {
  Pools pools;
  for (size_t i = 0; i < labels.size(); ++i) {
    (labels[i] ? pools.positive : pools.negative).push_back(i);
  }
  return pools;
}

void validate(std::span<const FeatureVector> rows, std::span<const int> labels,
              const EnsembleConfig &config, const Pools &pools) {
  if (rows.size() != labels.size()) {
    throw Error(ErrorKind::kData, "feature rows and labels differ in length");
  }
  if (config.num_trees < 1) throw Error(ErrorKind::kConfig, "num_trees must be >= 1");
  if (config.max_depth < 1) throw Error(ErrorKind::kConfig, "max_depth must be >= 1");
  if (config.subsample_size < 0) {
    throw Error(ErrorKind::kConfig, "subsample_size must be >= 0");
  }
  if (pools.positive.empty()) {
    throw Error(ErrorKind::kData, "positive pool is empty");
  }
  if (pools.negative.empty()) {
    throw Error(ErrorKind::kData, "negative pool is empty");
  }
}

DecisionTree grow_one(std::span<const FeatureVector> rows,
                      std::span<const int> labels, const Pools &pools,
                      const EnsembleConfig &config, size_t per_pool,
                      size_t tree_index) {
  Rng rng(derive_seed(config.seed, "quality_tree", tree_index));
  std::uniform_int_distribution<size_t> pick_pos(0, pools.positive.size() - 1);
  std::uniform_int_distribution<size_t> pick_neg(0, pools.negative.size() - 1);
  std::vector<size_t> sample;
  sample.reserve(2 * per_pool);
  for (size_t k = 0; k < per_pool; ++k) {
    sample.push_back(pools.positive[pick_pos(rng)]);
    sample.push_back(pools.negative[pick_neg(rng)]);
  }
  return train_tree(rows, labels, sample, config.max_depth);
}

size_t samples_per_pool(const EnsembleConfig &config, const Pools &pools) {
  size_t k = config.subsample_size > 0
                 ? static_cast<size_t>(config.subsample_size)
                 : 2 * pools.positive.size();
  return std::max<size_t>(1, k / 2);
}

std::vector<std::string> default_feature_names() {
  const auto &names = PhraseFeatures::names();
  return {names.begin(), names.end()};
}

}  // namespace

bool DecisionTree::vote(std::span<const double> x) const {
  if (nodes_.empty()) return false;
  int id = 0;
  while (nodes_[id].feature >= 0) {
    id = x[nodes_[id].feature] <= nodes_[id].threshold ? nodes_[id].left
                                                       : nodes_[id].right;
  }
  return nodes_[id].positive_fraction > 0.5;
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::function<int(int)> walk = [&](int id) -> int {
    if (nodes_[id].feature < 0) return 0;
    return 1 + std::max(walk(nodes_[id].left), walk(nodes_[id].right));
  };
  return walk(0);
}

DecisionTree train_tree(std::span<const FeatureVector> rows,
                        std::span<const int> labels,
                        std::span<const size_t> sample, int max_depth) {
  TreeBuilder builder(rows, labels, max_depth);
  std::vector<size_t> idx(sample.begin(), sample.end());
  builder.build(idx, 0);
  return DecisionTree(builder.take());
}

double QualityModel::quality(std::span<const double> x) const {
  if (trees_.empty()) return 0.0;
  size_t votes = 0;
  for (const DecisionTree &tree : trees_) votes += tree.vote(x) ? 1 : 0;
  return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

QualityModel train_ensemble_serial(std::span<const FeatureVector> rows,
                                   std::span<const int> labels,
                                   const EnsembleConfig &config) {
  Pools pools = split_pools(labels);
  validate(rows, labels, config, pools);
  const size_t per_pool = samples_per_pool(config, pools);
  std::vector<DecisionTree> trees;
  for (int t = 0; t < config.num_trees; ++t) {
    trees.push_back(grow_one(rows, labels, pools, config, per_pool, t));
  }
  return QualityModel(default_feature_names(), std::move(trees));
}

QualityModel train_ensemble(std::span<const FeatureVector> rows,
                            std::span<const int> labels,
                            const EnsembleConfig &config) {
  Pools pools = split_pools(labels);
  validate(rows, labels, config, pools);
  const size_t per_pool = samples_per_pool(config, pools);
  std::vector<DecisionTree> trees(static_cast<size_t>(config.num_trees));
#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < config.num_trees; ++t) {
    trees[t] = grow_one(rows, labels, pools, config, per_pool, t);
  }
  return QualityModel(default_feature_names(), std::move(trees));
}

QualityModel train_quality_model(const WordSet &positives,
                                 std::span<const CandidateRow> candidates,
                                 const EnsembleConfig &config) {
  if (positives.empty()) throw Error(ErrorKind::kData, "positive phrase list is empty");
  if (candidates.empty()) throw Error(ErrorKind::kData, "no phrase candidates");
  std::vector<FeatureVector> rows;
  std::vector<int> labels;
  rows.reserve(candidates.size());
  labels.reserve(candidates.size());
  size_t matched = 0;
  for (const CandidateRow &row : candidates) {
    rows.push_back(row.features.values());
    int label = positives.count(row.candidate.phrase) ? 1 : 0;
    matched += label;
    labels.push_back(label);
  }
  if (matched == 0) {
    throw Error(ErrorKind::kData,
                "no candidate matches the positive phrase list; extend the "
                "positive list with phrases that occur in the corpus at least "
                "min_support times");
  }
  return train_ensemble(rows, labels, config);
}

std::string quality_model_to_json(const QualityModel &model) {
  json root;
  root["format_version"] = kQualityModelFormatVersion;
  root["kind"] = "quality_model";
  root["feature_names"] = model.feature_names();
  json trees = json::array();
  for (const DecisionTree &tree : model.trees()) {
    json nodes = json::array();
    for (const TreeNode &node : tree.nodes()) {
      if (node.feature < 0) {
        nodes.push_back(json::array({-1, node.positive_fraction}));
      } else {
        nodes.push_back(
            json::array({node.feature, node.threshold, node.left, node.right}));
      }
    }
    trees.push_back(std::move(nodes));
  }
  root["trees"] = std::move(trees);
  return root.dump() + "\n";
}

QualityModel quality_model_from_json(std::string_view content) {
  json root;
  try {
    root = json::parse(content);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::kInput, std::string("quality model: ") + e.what());
  }
  if (root.value("kind", "") != "quality_model" ||
      root.value("format_version", 0) != kQualityModelFormatVersion) {
    throw Error(ErrorKind::kInput, "not a supported quality_model artifact");
  }
  auto names = root.at("feature_names").get<std::vector<std::string>>();
  if (names != default_feature_names()) {
    throw Error(ErrorKind::kInput, "quality model feature ordering mismatch");
  }
  std::vector<DecisionTree> trees;
  for (const json &jt : root.at("trees")) {
    std::vector<TreeNode> nodes;
    for (const json &jn : jt) {
      TreeNode node;
      node.feature = jn.at(0).get<int>();
      if (node.feature < 0) {
        node.positive_fraction = jn.at(1).get<double>();
      } else {
        node.threshold = jn.at(1).get<double>();
        node.left = jn.at(2).get<int>();
        node.right = jn.at(3).get<int>();
      }
      nodes.push_back(node);
    }
    const int n = static_cast<int>(nodes.size());
    for (const TreeNode &node : nodes) {
      if (node.feature >= static_cast<int>(kNumPhraseFeatures) ||
          (node.feature >= 0 &&
           (node.left <= 0 || node.left >= n || node.right <= 0 || node.right >= n))) {
        throw Error(ErrorKind::kInput, "quality model: malformed tree");
      }
    }
    trees.emplace_back(std::move(nodes));
  }
  return QualityModel(std::move(names), std::move(trees));
}

}  // namespace skillminer
