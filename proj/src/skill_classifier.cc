#include "skillminer/skill_classifier.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "skillminer/common.h"
#include "skillminer/text.h"

namespace skillminer {

using json = nlohmann::json;

namespace {

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void ClassifierConfig::validate() const {
  if (hidden < 1) throw Error(ErrorKind::kConfig, "hidden size must be >= 1");
  if (epochs < 0) throw Error(ErrorKind::kConfig, "epochs must be >= 0");
  if (batch_size < 1) throw Error(ErrorKind::kConfig, "batch_size must be >= 1");
  if (!(learning_rate >= 0)) throw Error(ErrorKind::kConfig, "learning_rate must be >= 0");
}

SkillClassifier::SkillClassifier(int input_dim, int hidden, uint64_t seed)
    : input_dim_(input_dim), hidden_(hidden) {
  if (input_dim < 1 || hidden < 1) {
    throw Error(ErrorKind::kConfig, "classifier sizes must be positive");
  }
  const size_t d = input_dim, h = hidden;
  params_.assign(d * h + h + h + 1, 0.0);
  Rng rng(derive_seed(seed, "skill_classifier_init"));
  const double limit1 = std::sqrt(6.0 / static_cast<double>(d + h));
  std::uniform_real_distribution<double> first(-limit1, limit1);
  for (size_t i = 0; i < d * h; ++i) params_[i] = first(rng);
  const double limit2 = std::sqrt(6.0 / static_cast<double>(h + 1));
  std::uniform_real_distribution<double> second(-limit2, limit2);
  for (size_t i = 0; i < h; ++i) params_[d * h + h + i] = second(rng);
}

SkillClassifier::SkillClassifier(int input_dim, int hidden, std::vector<double> parameters)
    : input_dim_(input_dim), hidden_(hidden), params_(std::move(parameters)) {
  const size_t d = input_dim, h = hidden;
  if (input_dim < 1 || hidden < 1 || params_.size() != d * h + h + h + 1) {
    throw Error(ErrorKind::kData, "classifier parameter count does not match layer sizes");
  }
}

void SkillClassifier::check_input(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim_) {
    throw Error(ErrorKind::kData, "classifier expects dimension " +
                                      std::to_string(input_dim_) + ", got " +
                                      std::to_string(x.size()));
  }
}

double SkillClassifier::logit(std::span<const double> x) const {
  check_input(x);
  const size_t d = input_dim_, h = hidden_;
  const double *w1 = params_.data();
  const double *b1 = w1 + d * h;
  const double *w2 = b1 + h;
  double z = params_.back();
  for (size_t j = 0; j < h; ++j) {
    double a = b1[j];
    for (size_t k = 0; k < d; ++k) a += w1[j * d + k] * x[k];
    if (a > 0) z += w2[j] * a;
  }
  return z;
}

double SkillClassifier::probability(std::span<const double> x) const {
  constexpr double kLow = std::numeric_limits<double>::min();
  constexpr double kHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  return std::clamp(sigmoid(logit(x)), kLow, kHigh);
}

SkillPrediction SkillClassifier::predict(const Embedding &embedding,
                                         double decision_threshold) const {
  SkillPrediction out;
  out.probability = probability(embedding.values);
  out.is_skill = out.probability >= decision_threshold;
  return out;
}

double SkillClassifier::loss(std::span<const double> x, int label) const {
  double z = logit(x);
  return label ? softplus(-z) : softplus(z);
}

double SkillClassifier::accumulate_gradient(std::span<const double> x, int label,
                                            std::span<double> grad) const {
  check_input(x);
  const size_t d = input_dim_, h = hidden_;
  const double *w1 = params_.data();
  const double *b1 = w1 + d * h;
  const double *w2 = b1 + h;
  std::vector<double> act(h);
  double z = params_.back();
  for (size_t j = 0; j < h; ++j) {
    double a = b1[j];
    for (size_t k = 0; k < d; ++k) a += w1[j * d + k] * x[k];
    act[j] = a;
    if (a > 0) z += w2[j] * a;
  }
  const double dz = sigmoid(z) - label;
  double *g_w1 = grad.data();
  double *g_b1 = g_w1 + d * h;
  double *g_w2 = g_b1 + h;
  for (size_t j = 0; j < h; ++j) {
    if (act[j] <= 0) continue;
    g_w2[j] += dz * act[j];
    const double da = dz * w2[j];
    g_b1[j] += da;
    for (size_t k = 0; k < d; ++k) g_w1[j * d + k] += da * x[k];
  }
  grad.back() += dz;
  return label ? softplus(-z) : softplus(z);
}

TrainingResult train_classifier(const std::vector<LabeledTerm> &data,
                                const ClassifierConfig &config) {
  config.validate();
  if (data.empty()) throw Error(ErrorKind::kData, "no training data");
  size_t positives = 0;
  const size_t dim = data.front().embedding.dimension();
  for (const LabeledTerm &t : data) {
    if (t.label != 0 && t.label != 1) throw Error(ErrorKind::kData, "labels must be 0 or 1");
    if (t.embedding.dimension() != dim) {
      throw Error(ErrorKind::kData, "training embeddings differ in dimension");
    }
    positives += t.label;
  }
  if (positives == 0 || positives == data.size()) {
    throw Error(ErrorKind::kData, "training data must contain both skill and non-skill terms");
  }

  TrainingResult result{SkillClassifier(static_cast<int>(dim), config.hidden, config.seed), {}};
  SkillClassifier &model = result.model;
  Rng rng(derive_seed(config.seed, "skill_classifier_shuffle"));
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(model.parameter_count());
  const size_t batch = static_cast<size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t start = 0; start < order.size(); start += batch) {
      size_t end = std::min(order.size(), start + batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (size_t i = start; i < end; ++i) {
        const LabeledTerm &t = data[order[i]];
        model.accumulate_gradient(t.embedding.values, t.label, grad);
      }
      const double scale = config.learning_rate / static_cast<double>(end - start);
      std::vector<double> &params = model.mutable_parameters();
      for (size_t p = 0; p < params.size(); ++p) params[p] -= scale * grad[p];
    }
    double total = 0;
    for (const LabeledTerm &t : data) total += model.loss(t.embedding.values, t.label);
    result.loss_trace.push_back(total / static_cast<double>(data.size()));
  }
  return result;
}

double gradient_check(const SkillClassifier &model, std::span<const double> x, int label,
                      double step) {
  std::vector<double> analytic(model.parameter_count(), 0.0);
  model.accumulate_gradient(x, label, analytic);
  SkillClassifier probe = model;
  double worst = 0;
  for (size_t p = 0; p < analytic.size(); ++p) {
    double &param = probe.mutable_parameters()[p];
    const double saved = param;
    param = saved + step;
    double plus = probe.loss(x, label);
    param = saved - step;
    double minus = probe.loss(x, label);
    param = saved;
    double numeric = (plus - minus) / (2 * step);
    double denom = std::max({std::abs(analytic[p]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic[p] - numeric) / denom);
  }
  return worst;
}

std::vector<std::string> sample_negatives(const std::vector<std::string> &positives,
                                          const std::vector<std::string> &pool,
                                          size_t count, uint64_t seed) {
  std::unordered_set<std::string> excluded(positives.begin(), positives.end());
  std::vector<std::string> eligible;
  std::unordered_set<std::string> seen;
  for (const std::string &p : pool) {
    if (!excluded.count(p) && seen.insert(p).second) eligible.push_back(p);
  }
  Rng rng(derive_seed(seed, "negative_sampling"));
  std::shuffle(eligible.begin(), eligible.end(), rng);
  if (eligible.size() > count) eligible.resize(count);
  return eligible;
}

std::vector<std::pair<std::string, int>> parse_labeled_terms(std::string_view content) {
  std::vector<std::pair<std::string, int>> out;
  size_t pos = 0, line_no = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    size_t tab = line.rfind('\t');
    std::string_view label = tab == std::string_view::npos ? "" : line.substr(tab + 1);
    if (label != "0" && label != "1") {
      throw Error(ErrorKind::kInput,
                  "labeled terms line " + std::to_string(line_no) + ": expected phrase<TAB>0|1");
    }
    std::string phrase = text::to_lower(text::join(text::split_whitespace(line.substr(0, tab)), " "));
    if (phrase.empty()) {
      throw Error(ErrorKind::kInput, "labeled terms line " + std::to_string(line_no) + ": empty phrase");
    }
    out.emplace_back(std::move(phrase), label == "1" ? 1 : 0);
  }
  return out;
}

std::string format_labeled_terms(const std::vector<std::pair<std::string, int>> &terms) {
  std::string out;
  for (const auto &[phrase, label] : terms) out += phrase + "\t" + std::to_string(label) + "\n";
  return out;
}

std::string classifier_to_json(const SkillClassifier &model, uint64_t seed) {
  const size_t d = model.input_dim(), h = model.hidden();
  const auto &p = model.parameters();
  json root;
  root["format_version"] = kClassifierFormatVersion;
  root["kind"] = "skill_classifier";
  root["layer_sizes"] = {model.input_dim(), model.hidden(), 1};
  root["hidden_activation"] = "relu";
  root["output_activation"] = "logistic";
  root["seed"] = seed;
  root["w1"] = std::vector<double>(p.begin(), p.begin() + d * h);
  root["b1"] = std::vector<double>(p.begin() + d * h, p.begin() + d * h + h);
  root["w2"] = std::vector<double>(p.begin() + d * h + h, p.begin() + d * h + 2 * h);
  root["b2"] = p.back();
  return root.dump() + "\n";
}

SkillClassifier classifier_from_json(std::string_view content) {
  json root;
  try {
    root = json::parse(content);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::kInput, std::string("classifier: ") + e.what());
  }
  if (root.value("kind", "") != "skill_classifier" ||
      root.value("format_version", 0) != kClassifierFormatVersion) {
    throw Error(ErrorKind::kInput, "not a supported skill_classifier artifact");
  }
  auto sizes = root.at("layer_sizes").get<std::vector<int>>();
  if (sizes.size() != 3 || sizes[2] != 1) {
    throw Error(ErrorKind::kInput, "classifier: layer_sizes must be [D, H, 1]");
  }
  std::vector<double> params = root.at("w1").get<std::vector<double>>();
  for (const char *key : {"b1", "w2"}) {
    auto part = root.at(key).get<std::vector<double>>();
    params.insert(params.end(), part.begin(), part.end());
  }
  params.push_back(root.at("b2").get<double>());
  return SkillClassifier(sizes[0], sizes[1], std::move(params));
}

}  // namespace skillminer
