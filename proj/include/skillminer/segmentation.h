#ifndef SKILLMINER_SEGMENTATION_H_
#define SKILLMINER_SEGMENTATION_H_

#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "skillminer/corpus.h"
#include "skillminer/phrase_features.h"
#include "skillminer/quality_model.h"

namespace skillminer {

// Empirical distribution of POS-tag sequences over occurrences of
// positive-pool phrases. Keys are tags joined by spaces.
class PosGuide {
 public:
  PosGuide() = default;
  explicit PosGuide(std::unordered_map<std::string, double> probabilities)
      : probabilities_(std::move(probabilities)) {}

  double probability(const std::string &tag_sequence) const;
  bool empty() const { return probabilities_.empty(); }

 private:
  std::unordered_map<std::string, double> probabilities_;
};

PosGuide build_pos_guide(const std::vector<Document> &docs,
                         const WordSet &positive_pool, int max_n);

// Scores candidate segments of a sentence. A multi-token segment v scores
// quality(v) * p(v) (times the POS-sequence probability when a guide is
// attached and every token carries a tag); a single token w scores
// p(w) * unigram_floor. Tokens unseen in the corpus count as seen once.
class SegmentScorer {
 public:
  SegmentScorer(const CorpusStats &stats,
                std::unordered_map<std::string, double> quality, int max_n,
                double unigram_floor = 1.0, const PosGuide *pos_guide = nullptr);

  // Quality of multiword candidate rows under a trained model.
  static std::unordered_map<std::string, double> quality_table(
      const QualityModel &model, std::span<const CandidateRow> rows);

  // Natural log of the segment score; -inf marks an illegal segment.
  double log_score(const TokenizedSentence &sentence,
                   const std::vector<std::string> &keys, size_t begin,
                   size_t end) const;

  int max_n() const { return max_n_; }
  double quality(const std::string &phrase) const;

 private:
  const CorpusStats &stats_;
  std::unordered_map<std::string, double> quality_;
  int max_n_;
  double unigram_floor_;
  const PosGuide *pos_guide_;
};

struct SegmentationResult {
  // [begin, end) token spans, in order, covering the sentence exactly.
  std::vector<std::pair<size_t, size_t>> segments;
  // Sum of segment log-scores.
  double score = 0;

  std::vector<std::string> phrases(const TokenizedSentence &sentence) const;
};

// Dynamic program over segment end positions; returns the segmentation
// with the maximal total log-score. Among equal scores, the earliest
// found split (shorter last segment) is kept.
SegmentationResult segment_sentence(const SegmentScorer &scorer,
                                    const TokenizedSentence &sentence);

std::vector<SegmentationResult> segment_sentences(
    const SegmentScorer &scorer,
    std::span<const TokenizedSentence *const> sentences);
std::vector<SegmentationResult> segment_sentences_serial(
    const SegmentScorer &scorer,
    std::span<const TokenizedSentence *const> sentences);

std::vector<const TokenizedSentence *> all_sentences(
    const std::vector<Document> &docs);

}  // namespace skillminer

#endif  // SKILLMINER_SEGMENTATION_H_
