#include "skillminer/segmentation.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skillminer/common.h"

namespace skillminer {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string tag_sequence(const TokenizedSentence &sentence, size_t begin,
                         size_t end, bool *complete) {
  std::string out;
  *complete = true;
  for (size_t i = begin; i < end; ++i) {
    const auto &tag = sentence.tokens[i].pos_tag;
    if (!tag) {
      *complete = false;
      return {};
    }
    if (i > begin) out.push_back(' ');
    out.append(*tag);
  }
  return out;
}

}  // namespace

double PosGuide::probability(const std::string &tag_sequence) const {
  auto it = probabilities_.find(tag_sequence);
  return it == probabilities_.end() ? 0.0 : it->second;
}

PosGuide build_pos_guide(const std::vector<Document> &docs,
                         const WordSet &positive_pool, int max_n) {
  std::unordered_map<std::string, double> counts;
  double total = 0;
  for (const Document &doc : docs) {
    for (const Section &section : doc.sections) {
      for (const TokenizedSentence &sentence : section.sentences) {
        std::vector<std::string> keys = sentence.keys();
        for (size_t i = 0; i < keys.size(); ++i) {
          for (size_t n = 2; n <= static_cast<size_t>(max_n) && i + n <= keys.size();
               ++n) {
            if (!positive_pool.count(ngram_key(keys, i, i + n))) continue;
            bool complete = false;
            std::string tags = tag_sequence(sentence, i, i + n, &complete);
            if (!complete) continue;
            counts[tags] += 1;
            total += 1;
          }
        }
      }
    }
  }
  if (total > 0) {
    for (auto &[tags, value] : counts) value /= total;
  }
  return PosGuide(std::move(counts));
}

SegmentScorer::SegmentScorer(const CorpusStats &stats,
                             std::unordered_map<std::string, double> quality,
                             int max_n, double unigram_floor,
                             const PosGuide *pos_guide)
    : stats_(stats),
      quality_(std::move(quality)),
      max_n_(max_n),
      unigram_floor_(unigram_floor),
      pos_guide_(pos_guide) {
  if (max_n < 1) throw Error(ErrorKind::kConfig, "max_n must be >= 1");
  if (!(unigram_floor > 0)) {
    throw Error(ErrorKind::kConfig, "unigram_floor must be positive");
  }
}

std::unordered_map<std::string, double> SegmentScorer::quality_table(
    const QualityModel &model, std::span<const CandidateRow> rows) {
  std::unordered_map<std::string, double> table;
  for (const CandidateRow &row : rows) {
    if (row.candidate.length() < 2) continue;
    table[row.candidate.phrase] = model.quality(row.features);
  }
  return table;
}

double SegmentScorer::quality(const std::string &phrase) const {
  auto it = quality_.find(phrase);
  return it == quality_.end() ? 0.0 : it->second;
}

double SegmentScorer::log_score(const TokenizedSentence &sentence,
                                const std::vector<std::string> &keys,
                                size_t begin, size_t end) const {
  const size_t n = end - begin;
  if (n == 1) {
    uint64_t count = stats_.count(keys[begin]);
    double mass = static_cast<double>(std::max<uint64_t>(stats_.order_mass(1), 1));
    double p = static_cast<double>(std::max<uint64_t>(count, 1)) / mass;
    return std::log(p * unigram_floor_);
  }
  if (n > static_cast<size_t>(max_n_)) return kNegInf;
  std::string key = ngram_key(keys, begin, end);
  double q = quality(key);
  if (q <= 0) return kNegInf;
  double p = popularity(stats_, key);
  if (p <= 0) return kNegInf;
  double score = q * p;
  if (pos_guide_ != nullptr && !pos_guide_->empty()) {
    bool complete = false;
    std::string tags = tag_sequence(sentence, begin, end, &complete);
    if (complete) score *= pos_guide_->probability(tags);
  }
  return score > 0 ? std::log(score) : kNegInf;
}

std::vector<std::string> SegmentationResult::phrases(
    const TokenizedSentence &sentence) const {
  std::vector<std::string> keys = sentence.keys();
  std::vector<std::string> out;
  out.reserve(segments.size());
  for (const auto &[begin, end] : segments) out.push_back(ngram_key(keys, begin, end));
  return out;
}

SegmentationResult segment_sentence(const SegmentScorer &scorer,
                                    const TokenizedSentence &sentence) {
  SegmentationResult result;
  const size_t n = sentence.tokens.size();
  if (n == 0) return result;
  std::vector<std::string> keys = sentence.keys();
  std::vector<double> best(n + 1, kNegInf);
  std::vector<size_t> back(n + 1, 0);
  best[0] = 0;
  const size_t max_len = static_cast<size_t>(scorer.max_n());
  for (size_t j = 1; j <= n; ++j) {
    for (size_t len = 1; len <= std::min(max_len, j); ++len) {
      size_t i = j - len;
      if (best[i] == kNegInf) continue;
      double s = scorer.log_score(sentence, keys, i, j);
      if (s == kNegInf) continue;
      double candidate = best[i] + s;
      if (candidate > best[j]) {
        best[j] = candidate;
        back[j] = i;
      }
    }
  }
  for (size_t j = n; j > 0; j = back[j]) result.segments.emplace_back(back[j], j);
  std::reverse(result.segments.begin(), result.segments.end());
  result.score = best[n];
  return result;
}

std::vector<SegmentationResult> segment_sentences_serial(
    const SegmentScorer &scorer,
    std::span<const TokenizedSentence *const> sentences) {
  std::vector<SegmentationResult> out;
  out.reserve(sentences.size());
  for (const TokenizedSentence *s : sentences) out.push_back(segment_sentence(scorer, *s));
  return out;
}

std::vector<SegmentationResult> segment_sentences(
    const SegmentScorer &scorer,
    std::span<const TokenizedSentence *const> sentences) {
  std::vector<SegmentationResult> out(sentences.size());
  const long n = static_cast<long>(sentences.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < n; ++i) out[i] = segment_sentence(scorer, *sentences[i]);
  return out;
}

std::vector<const TokenizedSentence *> all_sentences(
    const std::vector<Document> &docs) {
  std::vector<const TokenizedSentence *> out;
  for (const Document &doc : docs) {
    for (const Section &section : doc.sections) {
      for (const TokenizedSentence &sentence : section.sentences) {
        out.push_back(&sentence);
      }
    }
  }
  return out;
}

}  // namespace skillminer
