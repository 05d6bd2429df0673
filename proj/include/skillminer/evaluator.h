#ifndef SKILLMINER_EVALUATOR_H_
#define SKILLMINER_EVALUATOR_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace skillminer {

// Character offsets are in Unicode code points, end exclusive.
struct Span {
  size_t start = 0;
  size_t end = 0;

  bool operator==(const Span &) const = default;
  bool overlaps(const Span &other) const {
    return start < other.end && other.start < end;
  }
};

struct GoldDocument {
  std::string doc_id;
  std::string text;
  std::vector<Span> spans;  // all labeled SKILL
};

struct PredictionSet {
  std::string doc_id;
  std::vector<Span> spans;
};

struct MatchCounts {
  uint64_t tp = 0;
  uint64_t fp = 0;
  uint64_t fn = 0;
};

struct Metrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  MatchCounts counts;
};

struct EvalReport {
  Metrics full;
  Metrics partial;
  bool empty_predictions = false;
};

enum class MatchMode { kFull, kPartial };

// Greedy one-to-one matching: predictions in order, each taking the first
// still-unmatched gold span that equals it (full) or shares at least one
// character with it (partial).
uint64_t count_matches(const std::vector<Span> &gold, const std::vector<Span> &predicted,
                       MatchMode mode);

// Micro-averaged over all documents. Gold documents without predictions
// contribute only false negatives; a prediction for an unknown document is
// an error. With no predictions, precision is reported as 0.
EvalReport evaluate(const std::vector<GoldDocument> &gold,
                    const std::vector<PredictionSet> &predictions);

Metrics metrics_from_counts(const MatchCounts &counts);

// All non-overlapping, case-insensitive, word-boundary-anchored occurrences
// of phrase in text. Spaces or underscores between phrase tokens match any
// run of whitespace or underscores in the text.
std::vector<Span> span_align(std::string_view text, std::string_view phrase);

// Gold JSONL: {"doc_id", "text", "spans": [[start, end], ...]} per line.
std::vector<GoldDocument> parse_gold(std::string_view content);
std::string format_gold(const std::vector<GoldDocument> &docs);
// Prediction JSONL: {"doc_id", "spans": [[start, end], ...]} per line.
std::vector<PredictionSet> parse_predictions(std::string_view content);
std::string format_predictions(const std::vector<PredictionSet> &predictions);

// Phrase TSV whose first column is doc_id and whose phrase sits in
// `phrase_column`; each phrase is aligned against that document's gold text.
std::vector<PredictionSet> predictions_from_phrase_tsv(
    std::string_view content, const std::vector<GoldDocument> &gold,
    size_t phrase_column, std::vector<std::string> *warnings = nullptr);

std::string report_to_json(const EvalReport &report);
EvalReport report_from_json(std::string_view content);

}  // namespace skillminer

#endif  // SKILLMINER_EVALUATOR_H_
