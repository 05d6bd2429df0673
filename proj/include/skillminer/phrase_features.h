#ifndef SKILLMINER_PHRASE_FEATURES_H_
#define SKILLMINER_PHRASE_FEATURES_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "skillminer/corpus.h"

namespace skillminer {

using WordSet = std::unordered_set<std::string>;

// Phrase list file: one phrase per line, tokens separated by spaces. Lines
// are lowercased and whitespace-normalized into n-gram keys; blank lines and
// lines starting with '#' are skipped.
WordSet parse_phrase_list(std::string_view content);
WordSet load_phrase_list(const std::string &path);

struct PhraseCandidate {
  std::string phrase;  // n-gram key
  uint64_t frequency = 0;
  // Occurrences that survive as whole segments; starts equal to frequency.
  uint64_t rectified_frequency = 0;

  size_t length() const { return ngram_length(phrase); }
};

inline constexpr size_t kNumPhraseFeatures = 8;
using FeatureVector = std::array<double, kNumPhraseFeatures>;

struct PhraseFeatures {
  double popularity = 0;
  double pmi = 0;
  double pkl = 0;
  double has_stopword = 0;
  double avg_idf = 0;
  double quote_prob = 0;
  double bracket_prob = 0;
  double capitalized_prob = 0;

  FeatureVector values() const {
    return {popularity, pmi,          pkl,          has_stopword,
            avg_idf,    quote_prob,   bracket_prob, capitalized_prob};
  }
  static const std::array<std::string, kNumPhraseFeatures> &names();
};

// All stored n-grams with f >= min_support and length <= max_n, in key order.
std::vector<PhraseCandidate> extract_candidates(const CorpusStats &stats,
                                                uint64_t min_support,
                                                int max_n);

struct Split {
  size_t position = 0;  // number of tokens in the left part
  std::string left;
  std::string right;
  double pmi = 0;
};

// log(p(v) / (p(left) p(right))). +inf when a part is unseen.
double pmi(const CorpusStats &stats, std::string_view left,
           std::string_view right);
double pmi(double p_phrase, double p_left, double p_right);

// p(v) * PMI. Zero when p(v) is zero; a seen phrase with an unseen part
// is an error.
double pkl(const CorpusStats &stats, std::string_view phrase,
           std::string_view left, std::string_view right);

// Split of a multiword key minimizing PMI; the leftmost split wins ties.
Split best_split(const CorpusStats &stats, std::string_view phrase);

// How often a phrase's occurrences sit inside quotes, inside brackets, or
// start with a capital letter.
struct OccurrenceContext {
  uint64_t occurrences = 0;
  uint64_t quoted = 0;
  uint64_t bracketed = 0;
  uint64_t capitalized = 0;

  void merge(const OccurrenceContext &other);
  bool operator==(const OccurrenceContext &) const = default;
};
using ContextTable = std::unordered_map<std::string, OccurrenceContext>;

ContextTable collect_contexts(const std::vector<Document> &docs,
                              const std::vector<PhraseCandidate> &candidates,
                              int max_n);
ContextTable collect_contexts_serial(
    const std::vector<Document> &docs,
    const std::vector<PhraseCandidate> &candidates, int max_n);

// Popularity, PMI and PKL use candidate.rectified_frequency for the phrase
// itself; its parts use the raw counts in stats. A stopword anywhere in the
// phrase (edge or inside) sets has_stopword.
PhraseFeatures compute_features(const CorpusStats &stats,
                                const PhraseCandidate &candidate,
                                const ContextTable &contexts,
                                const WordSet &stopwords);

struct CandidateRow {
  PhraseCandidate candidate;
  PhraseFeatures features;
  double quality = 0;
};

std::vector<CandidateRow> compute_all_features(
    const CorpusStats &stats, const std::vector<PhraseCandidate> &candidates,
    const ContextTable &contexts, const WordSet &stopwords);

}  // namespace skillminer

#endif  // SKILLMINER_PHRASE_FEATURES_H_
