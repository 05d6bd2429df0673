#ifndef SKILLMINER_PHRASE_MINER_H_
#define SKILLMINER_PHRASE_MINER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "skillminer/corpus.h"
#include "skillminer/phrase_features.h"
#include "skillminer/quality_model.h"
#include "skillminer/segmentation.h"

namespace skillminer {

struct MinerConfig {
  uint64_t min_support = 5;
  int max_n = 6;
  int num_trees = 100;
  int subsample_size = 0;  // 0: twice the positive pool
  int max_depth = 4;
  double quality_threshold = 0.5;
  int iterations = 1;
  double unigram_floor = 1.0;
  bool pos_guidance = false;
  uint64_t seed = 0;

  EnsembleConfig ensemble(int iteration) const;
  void validate() const;
};

struct RectifyResult {
  QualityModel model;
  std::vector<CandidateRow> rows;  // survivors, features and quality updated
};

// Segments every sentence with the current model, sets each candidate's
// rectified frequency to the number of segments equal to it, drops
// candidates that never survive as a segment, recomputes features from
// the rectified counts and retrains. Repeats `iterations` times.
RectifyResult rectify_and_retrain(const QualityModel &model,
                                  const CorpusStats &stats,
                                  std::vector<CandidateRow> rows,
                                  const std::vector<Document> &docs,
                                  const ContextTable &contexts,
                                  const WordSet &stopwords,
                                  const WordSet &positives,
                                  const MinerConfig &config);

struct MinedPhrase {
  std::string phrase;
  double quality = 0;
};

struct MiningResult {
  CorpusStats stats;
  QualityModel model;
  std::vector<CandidateRow> rows;     // every surviving candidate
  std::vector<MinedPhrase> phrases;   // quality >= threshold, best first
};

// count -> candidates -> features -> train -> segment/rectify -> score.
// docs must already be tokenized.
MiningResult mine_phrases(const std::vector<Document> &docs,
                          const WordSet &positives, const WordSet &stopwords,
                          const MinerConfig &config);

// Descending quality, ties by phrase.
std::vector<MinedPhrase> select_phrases(const std::vector<CandidateRow> &rows,
                                        double threshold);

// phrase<TAB>quality, one per line.
std::string format_mined_phrases(const std::vector<MinedPhrase> &phrases);
std::vector<MinedPhrase> parse_mined_phrases(std::string_view content);

// phrase<TAB>frequency<TAB>rectified<TAB>feature values..., with a header.
std::string format_candidate_rows(const std::vector<CandidateRow> &rows);
std::vector<CandidateRow> parse_candidate_rows(std::string_view content);

}  // namespace skillminer

#endif  // SKILLMINER_PHRASE_MINER_H_
