#ifndef SKILLMINER_QUALITY_MODEL_H_
#define SKILLMINER_QUALITY_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skillminer/phrase_features.h"

namespace skillminer {

// Axis-aligned binary tree. Inner nodes send x[feature] <= threshold left.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0;
  int left = -1;
  int right = -1;
  double positive_fraction = 0;  // leaves only
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  // A leaf votes positive when strictly more than half of its training
  // samples were positive.
  bool vote(std::span<const double> x) const;
  int depth() const;
  const std::vector<TreeNode> &nodes() const { return nodes_; }

 private:
  std::vector<TreeNode> nodes_;
};

// Gini-impurity tree grown on rows[sample[i]] with binary labels. Splits
// must strictly reduce impurity; ties go to the lower feature index, then
// the lower threshold.
DecisionTree train_tree(std::span<const FeatureVector> rows,
                        std::span<const int> labels,
                        std::span<const size_t> sample, int max_depth);

struct EnsembleConfig {
  int num_trees = 100;
  // Samples per tree, half from each pool. 0 means twice the positive pool.
  int subsample_size = 0;
  int max_depth = 4;
  uint64_t seed = 0;
};

class QualityModel {
 public:
  QualityModel() = default;
  QualityModel(std::vector<std::string> feature_names,
               std::vector<DecisionTree> trees)
      : feature_names_(std::move(feature_names)), trees_(std::move(trees)) {}

  // Fraction of trees voting positive.
  double quality(std::span<const double> x) const;
  double quality(const PhraseFeatures &features) const {
    FeatureVector v = features.values();
    return quality(v);
  }

  const std::vector<std::string> &feature_names() const { return feature_names_; }
  const std::vector<DecisionTree> &trees() const { return trees_; }

 private:
  std::vector<std::string> feature_names_;
  std::vector<DecisionTree> trees_;
};

// Trains num_trees trees on balanced bootstrap subsamples drawn with
// replacement from the positive (label 1) and negative (label 0) rows.
// Trees are grown in parallel; tree t draws from its own seeded stream.
QualityModel train_ensemble(std::span<const FeatureVector> rows,
                            std::span<const int> labels,
                            const EnsembleConfig &config);
QualityModel train_ensemble_serial(std::span<const FeatureVector> rows,
                                   std::span<const int> labels,
                                   const EnsembleConfig &config);

// Distant supervision: candidates whose key is in the positive list form
// the positive pool, every other candidate the negative pool.
QualityModel train_quality_model(const WordSet &positives,
                                 std::span<const CandidateRow> candidates,
                                 const EnsembleConfig &config);

inline constexpr int kQualityModelFormatVersion = 1;
std::string quality_model_to_json(const QualityModel &model);
QualityModel quality_model_from_json(std::string_view content);

}  // namespace skillminer

#endif  // SKILLMINER_QUALITY_MODEL_H_
