#include "skillminer/quality_model.h"

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "skillminer/common.h"

namespace skillminer {
namespace {

struct Dataset {
  std::vector<FeatureVector> rows;
  std::vector<int> labels;
};

Dataset random_dataset(size_t n, uint64_t seed, bool separable_on_pkl) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0, 1);
  Dataset d;
  for (size_t i = 0; i < n; ++i) {
    FeatureVector v;
    for (double &x : v) x = unit(rng);
    int label = unit(rng) < 0.5;
    if (separable_on_pkl) v[2] = label ? 0.6 + 0.4 * unit(rng) : 0.4 * unit(rng);
    d.rows.push_back(v);
    d.labels.push_back(label);
  }
  return d;
}

double gini(size_t pos, size_t n) {
  if (n == 0) return 0;
  double p = static_cast<double>(pos) / static_cast<double>(n);
  return 2 * p * (1 - p);
}

TEST(TrainTree, SeparableSplitsOnPkl) {
  Dataset d = random_dataset(200, 1, true);
  std::vector<size_t> sample(d.rows.size());
  std::iota(sample.begin(), sample.end(), 0);
  DecisionTree tree = train_tree(d.rows, d.labels, sample, 4);
  ASSERT_FALSE(tree.nodes().empty());
  EXPECT_EQ(tree.nodes()[0].feature, 2);
  int correct = 0;
  for (size_t i = 0; i < d.rows.size(); ++i) correct += tree.vote(d.rows[i]) == (d.labels[i] == 1);
  EXPECT_GE(correct, 190);
}

TEST(TrainTree, RootSplitMatchesExhaustiveGini) {
  Dataset d = random_dataset(40, 2, false);
  std::vector<size_t> sample(d.rows.size());
  std::iota(sample.begin(), sample.end(), 0);
  DecisionTree tree = train_tree(d.rows, d.labels, sample, 1);
  size_t total_pos = std::accumulate(d.labels.begin(), d.labels.end(), size_t{0});
  const size_t n = d.rows.size();
  double best = gini(total_pos, n);
  int best_feature = -1;
  double best_threshold = 0;
  for (int f = 0; f < static_cast<int>(kNumPhraseFeatures); ++f) {
    std::vector<double> values;
    for (const auto &r : d.rows) values.push_back(r[f]);
    std::sort(values.begin(), values.end());
    for (size_t k = 0; k + 1 < values.size(); ++k) {
      if (values[k] == values[k + 1]) continue;
      double thr = (values[k] + values[k + 1]) / 2;
      size_t ln = 0, lp = 0;
      for (size_t i = 0; i < n; ++i) {
        if (d.rows[i][f] <= thr) {
          ++ln;
          lp += d.labels[i];
        }
      }
      double weighted = (ln * gini(lp, ln) + (n - ln) * gini(total_pos - lp, n - ln)) / n;
      if (weighted < best - 1e-12) {
        best = weighted;
        best_feature = f;
        best_threshold = thr;
      }
    }
  }
  ASSERT_GE(best_feature, 0);
  EXPECT_EQ(tree.nodes()[0].feature, best_feature);
  EXPECT_EQ(tree.nodes()[0].threshold, best_threshold);
  EXPECT_EQ(tree.depth(), 1);
}

TEST(TrainTree, PureOrConstantDataIsALeaf) {
  std::vector<FeatureVector> rows(5, FeatureVector{});
  std::vector<int> labels = {1, 0, 1, 0, 1};
  std::vector<size_t> sample = {0, 1, 2, 3, 4};
  DecisionTree tree = train_tree(rows, labels, sample, 4);
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_EQ(tree.depth(), 0);
  EXPECT_TRUE(tree.vote(rows[0]));  // 3 of 5 positive
  std::vector<int> tie = {1, 0, 1, 0, 1};
  std::vector<size_t> even = {0, 1, 2, 3};
  EXPECT_FALSE(train_tree(rows, tie, even, 4).vote(rows[0]));  // 2 of 4 is not a majority
}

TEST(Ensemble, SingleTreeSeparable) {
  Dataset d = random_dataset(300, 3, true);
  EnsembleConfig config;
  config.num_trees = 1;
  config.subsample_size = 100;
  QualityModel model = train_ensemble(d.rows, d.labels, config);
  int correct = 0;
  for (size_t i = 0; i < d.rows.size(); ++i) {
    double q = model.quality(d.rows[i]);
    if (d.labels[i]) EXPECT_EQ(q, 1.0);
    correct += (q >= 0.5) == (d.labels[i] == 1);
  }
  EXPECT_GE(correct, 0.95 * d.rows.size());
}

TEST(Ensemble, RandomLabelsAverageHalf) {
  Dataset d = random_dataset(1000, 4, false);
  EnsembleConfig config;
  config.num_trees = 100;
  config.subsample_size = 100;
  config.seed = 9;
  QualityModel model = train_ensemble(d.rows, d.labels, config);
  double total = 0;
  for (const auto &r : d.rows) {
    double q = model.quality(r);
    total += q;
    // Vote fractions are multiples of 1/T.
    EXPECT_EQ(std::round(q * 100) / 100, q);
  }
  EXPECT_NEAR(total / d.rows.size(), 0.5, 0.1);
  for (const auto &t : model.trees()) EXPECT_LE(t.depth(), config.max_depth);
}

TEST(Ensemble, DeterministicForSeed) {
  Dataset d = random_dataset(200, 5, false);
  EnsembleConfig config;
  config.num_trees = 10;
  config.seed = 11;
  std::string a = quality_model_to_json(train_ensemble(d.rows, d.labels, config));
  EXPECT_EQ(a, quality_model_to_json(train_ensemble(d.rows, d.labels, config)));
  config.seed = 12;
  EXPECT_NE(a, quality_model_to_json(train_ensemble(d.rows, d.labels, config)));
}

TEST(Ensemble, NeedsBothPools) {
  Dataset d = random_dataset(10, 6, false);
  std::vector<int> all_negative(d.rows.size(), 0);
  EXPECT_THROW(train_ensemble(d.rows, all_negative, {}), Error);
}

TEST(DistantSupervision, PositiveListDefinesPool) {
  std::vector<CandidateRow> rows;
  for (int i = 0; i < 40; ++i) {
    CandidateRow row;
    row.candidate.phrase = "neg " + std::to_string(i);
    row.features.pkl = 0.01 * i;
    rows.push_back(row);
  }
  CandidateRow positive;
  positive.candidate.phrase = "data mining";
  positive.features.pkl = 5;
  rows.push_back(positive);
  WordSet positives = parse_phrase_list("Data Mining\nnot a candidate\n");
  EnsembleConfig config;
  config.num_trees = 20;
  QualityModel model = train_quality_model(positives, rows, config);
  EXPECT_EQ(model.quality(positive.features), 1.0);
  EXPECT_EQ(model.quality(rows[0].features), 0.0);
  EXPECT_THROW(train_quality_model({"absent"}, rows, config), Error);
}

TEST(QualityModelJson, RoundTripAndValidation) {
  Dataset d = random_dataset(200, 7, true);
  EnsembleConfig config;
  config.num_trees = 5;
  QualityModel model = train_ensemble(d.rows, d.labels, config);
  std::string json = quality_model_to_json(model);
  QualityModel back = quality_model_from_json(json);
  EXPECT_EQ(quality_model_to_json(back), json);
  for (const auto &r : d.rows) EXPECT_EQ(back.quality(r), model.quality(r));
  EXPECT_THROW(quality_model_from_json("{}"), Error);
  std::string swapped = json;
  size_t at = swapped.find("\"pmi\"");
  ASSERT_NE(at, std::string::npos);
  swapped.replace(at, 5, "\"xyz\"");
  EXPECT_THROW(quality_model_from_json(swapped), Error);
}

}  // namespace
}  // namespace skillminer
