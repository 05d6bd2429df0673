#include "skillminer/skill_classifier.h"

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "skillminer/common.h"

namespace skillminer {
namespace {

// Two Gaussian blobs in `dim` dimensions, centered at +/- 1 on the first axis.
std::vector<LabeledTerm> blobs(size_t per_class, int dim, uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> noise(0, 0.4);
  std::vector<LabeledTerm> out;
  for (size_t i = 0; i < 2 * per_class; ++i) {
    int label = static_cast<int>(i % 2);
    std::vector<double> v(dim);
    for (double &x : v) x = noise(rng);
    v[0] += label ? 1.0 : -1.0;
    out.push_back({"t" + std::to_string(i), label, Embedding{v}});
  }
  return out;
}

TEST(SkillClassifier, ParameterCount) {
  for (auto [d, h] : {std::pair{1, 1}, {50, 64}, {300, 8}}) {
    SkillClassifier model(d, h, uint64_t{1});
    EXPECT_EQ(model.parameter_count(), static_cast<size_t>(d * h + 2 * h + 1));
  }
  EXPECT_THROW(SkillClassifier(3, 2, std::vector<double>(5)), Error);
}

TEST(SkillClassifier, ProbabilityStrictlyInsideUnitInterval) {
  SkillClassifier model(4, 3, uint64_t{2});
  Rng rng(5);
  std::normal_distribution<double> n(0, 1);
  for (double scale : {1.0, 1e3, 1e6}) {
    for (int i = 0; i < 50; ++i) {
      std::vector<double> x(4);
      for (double &v : x) v = scale * n(rng);
      double p = model.probability(x);
      EXPECT_GT(p, 0.0);
      EXPECT_LT(p, 1.0);
    }
  }
}

TEST(SkillClassifier, ForwardMatchesHandComputation) {
  // W1 = [[1, -1], [0.5, 2]], b1 = [0, -1], w2 = [2, -3], b2 = 0.25
  SkillClassifier model(2, 2, std::vector<double>{1, -1, 0.5, 2, 0, -1, 2, -3, 0.25});
  std::vector<double> x = {1, 0.5};
  // h = relu([0.5, 0.5 + 1 - 1]) = [0.5, 0.5]; z = 1 - 1.5 + 0.25
  EXPECT_DOUBLE_EQ(model.logit(x), -0.25);
  EXPECT_NEAR(model.probability(x), 1 / (1 + std::exp(0.25)), 1e-15);
  EXPECT_NEAR(model.loss(x, 1), std::log1p(std::exp(0.25)), 1e-15);
  EXPECT_NEAR(model.loss(x, 0), std::log1p(std::exp(-0.25)), 1e-15);
}

TEST(SkillClassifier, GradientCheck) {
  Rng rng(9);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 5; ++trial) {
    SkillClassifier model(6, 5, derive_seed(3, "trial", trial));
    std::vector<double> x(6);
    for (double &v : x) v = n(rng);
    EXPECT_LT(gradient_check(model, x, trial % 2), 1e-4);
  }
}

TEST(SkillClassifier, ZeroInputGivesZeroFirstLayerWeightGradient) {
  SkillClassifier model(5, 4, uint64_t{4});
  std::vector<double> grad(model.parameter_count(), 0.0);
  std::vector<double> x(5, 0.0);
  model.accumulate_gradient(x, 1, grad);
  for (size_t p = 0; p < 5 * 4; ++p) EXPECT_EQ(grad[p], 0.0);
}

TEST(TrainClassifier, ZeroLearningRateLeavesParameters) {
  auto data = blobs(20, 3, 1);
  ClassifierConfig config;
  config.hidden = 4;
  config.epochs = 5;
  config.learning_rate = 0;
  config.seed = 11;
  auto result = train_classifier(data, config);
  EXPECT_EQ(result.model.parameters(), SkillClassifier(3, 4, uint64_t{11}).parameters());
  for (double l : result.loss_trace) EXPECT_EQ(l, result.loss_trace.front());
}

TEST(TrainClassifier, LossNonIncreasingAtSmallStep) {
  auto data = blobs(50, 4, 2);
  ClassifierConfig config;
  config.hidden = 8;
  config.epochs = 50;
  config.learning_rate = 1e-3;
  config.batch_size = static_cast<int>(data.size());
  config.seed = 3;
  auto trace = train_classifier(data, config).loss_trace;
  ASSERT_EQ(trace.size(), 50u);
  for (size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-12);
}

TEST(TrainClassifier, SeparatesBlobsAndIsDeterministic) {
  auto data = blobs(50, 4, 3);
  ClassifierConfig config;
  config.hidden = 8;
  config.epochs = 100;
  config.seed = 5;
  auto a = train_classifier(data, config);
  auto b = train_classifier(data, config);
  EXPECT_EQ(a.model.parameters(), b.model.parameters());
  size_t correct = 0;
  for (const auto &t : data) correct += a.model.predict(t.embedding).is_skill == (t.label == 1);
  EXPECT_GE(correct, data.size() * 95 / 100);
}

TEST(TrainClassifier, DuplicatedDataWithFullBatchGivesSameModel) {
  auto data = blobs(15, 3, 4);
  auto doubled = data;
  doubled.insert(doubled.end(), data.begin(), data.end());
  ClassifierConfig config;
  config.hidden = 5;
  config.epochs = 30;
  config.seed = 8;
  config.batch_size = 1000;
  auto a = train_classifier(data, config).model.parameters();
  auto b = train_classifier(doubled, config).model.parameters();
  ASSERT_EQ(a.size(), b.size());
  // Mean gradients agree up to summation order.
  for (size_t p = 0; p < a.size(); ++p) EXPECT_NEAR(a[p], b[p], 1e-10);
}

TEST(TrainClassifier, RejectsBadData) {
  ClassifierConfig config;
  EXPECT_THROW(train_classifier({}, config), Error);
  auto data = blobs(5, 2, 5);
  for (auto &t : data) t.label = 1;
  try {
    train_classifier(data, config);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
  }
  config.hidden = 0;
  EXPECT_THROW(train_classifier(blobs(5, 2, 5), config), Error);
}

TEST(Predict, Thresholds) {
  SkillClassifier model(1, 1, std::vector<double>{1, 0, 1, 0});
  Embedding e{{0.0}};  // logit 0, probability 0.5
  auto at_half = model.predict(e, 0.5);
  EXPECT_EQ(at_half.probability, 0.5);
  EXPECT_TRUE(at_half.is_skill);
  EXPECT_FALSE(model.predict(Embedding{{100.0}}, 1.0).is_skill);
  // Repeated calls do not change anything.
  auto params = model.parameters();
  EXPECT_EQ(model.predict(e).probability, model.predict(e).probability);
  EXPECT_EQ(model.parameters(), params);
  EXPECT_THROW(model.predict(Embedding{{1.0, 2.0}}), Error);
}

TEST(ClassifierJson, RoundTrip) {
  SkillClassifier model(7, 3, uint64_t{21});
  std::string json = classifier_to_json(model, 21);
  SkillClassifier back = classifier_from_json(json);
  EXPECT_EQ(back.input_dim(), 7);
  EXPECT_EQ(back.hidden(), 3);
  EXPECT_EQ(back.parameters(), model.parameters());
  EXPECT_EQ(classifier_to_json(back, 21), json);
  EXPECT_THROW(classifier_from_json("{\"kind\":\"other\"}"), Error);
  EXPECT_THROW(classifier_from_json("not json"), Error);
}

TEST(SampleNegatives, ExcludesPositivesAndIsSeeded) {
  std::vector<std::string> positives = {"a", "b"};
  std::vector<std::string> pool = {"a", "c", "d", "e", "c", "b", "f"};
  auto s = sample_negatives(positives, pool, 3, 1);
  ASSERT_EQ(s.size(), 3u);
  std::set<std::string> unique(s.begin(), s.end());
  EXPECT_EQ(unique.size(), 3u);
  EXPECT_FALSE(unique.count("a") || unique.count("b"));
  EXPECT_EQ(s, sample_negatives(positives, pool, 3, 1));
  EXPECT_EQ(sample_negatives(positives, pool, 100, 1).size(), 4u);
}

TEST(LabeledTerms, ParseAndFormat) {
  auto terms = parse_labeled_terms("Machine  Learning\t1\r\n\nfull time\t0\n");
  ASSERT_EQ(terms.size(), 2u);
  EXPECT_EQ(terms[0], (std::pair<std::string, int>{"machine learning", 1}));
  EXPECT_EQ(format_labeled_terms(terms), "machine learning\t1\nfull time\t0\n");
  EXPECT_THROW(parse_labeled_terms("x\t2\n"), Error);
  EXPECT_THROW(parse_labeled_terms("no label\n"), Error);
  EXPECT_THROW(parse_labeled_terms("\t1\n"), Error);
}

}  // namespace
}  // namespace skillminer
