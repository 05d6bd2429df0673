#ifndef SKILLMINER_SKILL_CLASSIFIER_H_
#define SKILLMINER_SKILL_CLASSIFIER_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skillminer/embedding.h"

namespace skillminer {

struct LabeledTerm {
  std::string phrase;
  int label = 0;  // 1 = skill
  Embedding embedding;
};

struct ClassifierConfig {
  int hidden = 64;
  int epochs = 200;
  double learning_rate = 0.1;
  int batch_size = 32;
  uint64_t seed = 0;

  void validate() const;
};

struct SkillPrediction {
  double probability = 0;
  bool is_skill = false;
};

// D -> H (ReLU) -> 1 (logistic). Parameters live in one flat vector laid
// out as [W1 row-major H x D | b1 | w2 | b2].
class SkillClassifier {
 public:
  SkillClassifier() = default;
  // Glorot-uniform weights from the given seed, zero biases.
  SkillClassifier(int input_dim, int hidden, uint64_t seed);
  SkillClassifier(int input_dim, int hidden, std::vector<double> parameters);

  int input_dim() const { return input_dim_; }
  int hidden() const { return hidden_; }
  size_t parameter_count() const { return params_.size(); }
  const std::vector<double> &parameters() const { return params_; }
  std::vector<double> &mutable_parameters() { return params_; }

  // Pre-sigmoid output.
  double logit(std::span<const double> x) const;
  // Strictly inside (0, 1) for finite input.
  double probability(std::span<const double> x) const;
  SkillPrediction predict(const Embedding &embedding,
                          double decision_threshold = 0.5) const;

  // Binary cross-entropy of one sample.
  double loss(std::span<const double> x, int label) const;
  // Adds dLoss/dParameters for one sample into grad; returns the loss.
  double accumulate_gradient(std::span<const double> x, int label,
                             std::span<double> grad) const;

 private:
  void check_input(std::span<const double> x) const;

  int input_dim_ = 0;
  int hidden_ = 0;
  std::vector<double> params_;
};

struct TrainingResult {
  SkillClassifier model;
  std::vector<double> loss_trace;  // mean loss over the data after each epoch
};

// Mini-batch gradient descent on mean binary cross-entropy. Batches follow
// a per-epoch shuffle drawn from the seed.
TrainingResult train_classifier(const std::vector<LabeledTerm> &data,
                                const ClassifierConfig &config);

// Max over all parameters of |analytic - numeric| / max(|analytic|,
// |numeric|, 1e-6), numeric from central differences.
double gradient_check(const SkillClassifier &model, std::span<const double> x,
                      int label, double step = 1e-5);

// Uniformly draws up to `count` phrases from pool that are not positives.
std::vector<std::string> sample_negatives(const std::vector<std::string> &positives,
                                          const std::vector<std::string> &pool,
                                          size_t count, uint64_t seed);

// phrase<TAB>label lines, label 0 or 1.
std::vector<std::pair<std::string, int>> parse_labeled_terms(std::string_view content);
std::string format_labeled_terms(const std::vector<std::pair<std::string, int>> &terms);

inline constexpr int kClassifierFormatVersion = 1;
std::string classifier_to_json(const SkillClassifier &model, uint64_t seed);
SkillClassifier classifier_from_json(std::string_view content);

}  // namespace skillminer

#endif  // SKILLMINER_SKILL_CLASSIFIER_H_
