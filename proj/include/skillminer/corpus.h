#ifndef SKILLMINER_CORPUS_H_
#define SKILLMINER_CORPUS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace skillminer {

enum class SectionKind {
  kTitle,
  kDescription,
  kCompensation,
  kRequirements,
  kAboutCompany,
  kContact,
  kOther,
};

const char *section_kind_name(SectionKind kind);
// Unknown names map to kOther.
SectionKind parse_section_kind(std::string_view name);

struct Token {
  std::string surface;
  // Lowercased surface; all counting and lookup keys are built from this.
  std::string key;
  std::optional<std::string> pos_tag;
  bool quoted = false;
  bool bracketed = false;
};

struct TokenizedSentence {
  std::vector<Token> tokens;

  std::vector<std::string> keys() const;
};

struct Section {
  SectionKind kind = SectionKind::kOther;
  std::string text;
  // Optional POS tags, one per token of the tokenized section in order.
  std::vector<std::string> pos_tags;
  std::vector<TokenizedSentence> sentences;

  // All token keys of the section, sentences concatenated.
  std::vector<std::string> keys() const;
};

struct Document {
  std::string id;
  std::vector<Section> sections;
};

// Splits text into sentences and tokens. Implementations must produce
// tokens with non-empty surfaces free of whitespace.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<TokenizedSentence> split(std::string_view text) const = 0;
};

// Sentences end at newlines and at '.', '!' or '?' followed by whitespace
// or end of text. Tokens are whitespace-separated; surrounding quotes,
// brackets and clause punctuation are stripped and recorded as the
// token's quoted/bracketed context. Underscore-joined multiword units of
// pre-tokenized input pass through as single tokens.
class DefaultTokenizer : public Tokenizer {
 public:
  std::vector<TokenizedSentence> split(std::string_view text) const override;
};

// Populates section.sentences and attaches POS tags when present.
void tokenize(Section &section, const Tokenizer &tokenizer);
void tokenize(std::vector<Document> &docs, const Tokenizer &tokenizer);

// Joins token keys with single spaces. N-grams are keyed by this form.
std::string ngram_key(const std::vector<std::string> &keys, size_t begin,
                      size_t end);
size_t ngram_length(std::string_view key);

// Corpus-wide n-gram statistics. Immutable once built; share freely.
class CorpusStats {
 public:
  CorpusStats() = default;
  explicit CorpusStats(int max_n);

  int max_n() const { return max_n_; }
  uint64_t num_docs() const { return num_docs_; }
  uint64_t total_token_occurrences() const { return total_tokens_; }

  uint64_t count(std::string_view ngram) const;
  uint64_t doc_frequency(std::string_view ngram) const;
  uint64_t word_count(std::string_view word) const;
  // Sum of counts over all stored n-grams of the given order.
  uint64_t order_mass(size_t n) const;

  const std::unordered_map<std::string, uint64_t> &ngram_counts() const {
    return counts_;
  }
  const std::unordered_map<std::string, uint64_t> &doc_freq() const {
    return doc_freq_;
  }
  const std::unordered_map<std::string, uint64_t> &word_counts() const {
    return word_counts_;
  }

  // Adds the statistics of a disjoint corpus.
  void merge(const CorpusStats &other);
  // Takes over other's tables when this one is still empty.
  void merge(CorpusStats &&other);

  // Records one document.
  void add_document(const Document &doc);

  bool operator==(const CorpusStats &other) const;

 private:
  friend CorpusStats stats_from_json(std::string_view);

  int max_n_ = 6;
  uint64_t num_docs_ = 0;
  uint64_t total_tokens_ = 0;
  std::unordered_map<std::string, uint64_t> counts_;
  std::unordered_map<std::string, uint64_t> doc_freq_;
  std::unordered_map<std::string, uint64_t> word_counts_;
  std::vector<uint64_t> order_mass_;
};

// Counts every contiguous token sequence of length 1..max_n inside each
// sentence. Documents are counted in parallel and the shards merged.
CorpusStats count_ngrams(const std::vector<Document> &docs, int max_n);
// Single-threaded reference for count_ngrams.
CorpusStats count_ngrams_serial(const std::vector<Document> &docs, int max_n);

// f_u over the total count of stored sequences of the same length.
// Returns 0 for unseen sequences.
double popularity(const CorpusStats &stats, std::string_view ngram);

// JSONL ingestion: one {"id", "sections":[{"kind","text"[,"pos"]}]} per line.
std::vector<Document> parse_corpus(std::string_view content);
std::vector<Document> load_corpus(const std::string &path);
std::string format_corpus(const std::vector<Document> &docs);
void save_corpus(const std::string &path, const std::vector<Document> &docs);

inline constexpr int kStatsFormatVersion = 1;
std::string stats_to_json(const CorpusStats &stats);
CorpusStats stats_from_json(std::string_view content);

}  // namespace skillminer

#endif  // SKILLMINER_CORPUS_H_
