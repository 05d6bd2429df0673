#ifndef SKILLMINER_PIPELINE_H_
#define SKILLMINER_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "skillminer/corpus.h"
#include "skillminer/embedding.h"
#include "skillminer/phrase_miner.h"
#include "skillminer/segmentation.h"
#include "skillminer/skill_classifier.h"

namespace skillminer {

// M1 mine only, M2 mine+rank, M3 mine+classify, M4 mine+rank+classify.
enum class PipelineMode { kM1, kM2, kM3, kM4 };

const char *mode_name(PipelineMode mode);
PipelineMode parse_mode(std::string_view name);
inline bool uses_ranking(PipelineMode m) {
  return m == PipelineMode::kM2 || m == PipelineMode::kM4;
}
inline bool uses_classifier(PipelineMode m) {
  return m == PipelineMode::kM3 || m == PipelineMode::kM4;
}

struct PipelineConfig {
  std::string corpus_path;
  std::string vectors_path;
  std::string positives_path;
  std::string stopwords_path;
  std::string frequencies_path;  // optional; corpus counts otherwise
  std::string labeled_path;
  std::string work_dir = "artifacts";
  PipelineMode mode = PipelineMode::kM4;
  uint64_t seed = 42;

  MinerConfig miner;
  SifConfig sif;
  double rank_threshold = 0.5;
  bool rank_all_sections = false;
  ClassifierConfig classifier;
  double decision_threshold = 0.5;

  // Missing keys keep their defaults; unknown keys are rejected.
  static PipelineConfig from_json(std::string_view content);
  std::string to_json() const;
  // Fingerprint of the canonical JSON form.
  std::string hash() const;
  // Propagates the top-level seed into the module configs.
  void apply_seed();
  void validate() const;
};

struct Extraction {
  std::string doc_id;
  size_t section_index = 0;
  std::string phrase;
  double quality = 0;
  std::optional<double> rank_score;
  std::optional<double> skill_probability;
};

// Everything the extraction stage reads. Pointers may be null when the
// mode does not need them.
struct ExtractionContext {
  const CorpusStats *stats = nullptr;
  const QualityModel *model = nullptr;
  const std::vector<CandidateRow> *rows = nullptr;
  const TextEmbedder *embedder = nullptr;
  const SkillClassifier *classifier = nullptr;
  const PosGuide *pos_guide = nullptr;  // when mining used POS guidance
};

// Detects skills in tokenized documents. Documents run in parallel; output
// keeps document order, then section order, then the order each stage
// leaves phrases in.
std::vector<Extraction> extract_skills(const std::vector<Document> &docs,
                                       const ExtractionContext &context,
                                       PipelineMode mode, const PipelineConfig &config);
std::vector<Extraction> extract_skills_serial(const std::vector<Document> &docs,
                                              const ExtractionContext &context,
                                              PipelineMode mode,
                                              const PipelineConfig &config);

// doc_id, section_index, phrase, quality, rank_score, skill_probability
// (a dash for stages the mode skips), with a header line.
std::string format_extractions(const std::vector<Extraction> &extractions);

// Labeled phrases plus mined negatives up to a 1:1 ratio, embedded and
// scaled to unit length (the classifier always sees unit-length input).
// Phrases without any known word are skipped and reported in warnings.
std::vector<LabeledTerm> build_training_set(
    const std::vector<std::pair<std::string, int>> &labeled,
    const std::vector<MinedPhrase> &negative_pool, const TextEmbedder &embedder,
    uint64_t seed, std::vector<std::string> *warnings = nullptr);

struct PipelineInputs {
  std::vector<Document> docs;  // tokenized
  WordSet positives;
  WordSet stopwords;
  std::optional<VectorStore> vectors;  // needed by M2-M4
  std::vector<std::pair<std::string, int>> labeled;
};

struct PipelineOutput {
  MiningResult mining;
  std::optional<SkillClassifier> classifier;
  std::vector<Extraction> extractions;
};

// In-process end-to-end run for config.mode. The vector store gets its
// frequencies from the mined corpus statistics unless it already has some.
PipelineOutput run_pipeline(PipelineInputs &inputs, const PipelineConfig &config);

// JSON manifest for a stage: config hash, seed and artifact versions.
std::string make_manifest(const PipelineConfig &config, std::string_view stage,
                          const std::vector<std::string> &artifacts);

}  // namespace skillminer

#endif  // SKILLMINER_PIPELINE_H_
