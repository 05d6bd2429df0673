#ifndef SKILLMINER_EMBEDDING_H_
#define SKILLMINER_EMBEDDING_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "skillminer/corpus.h"

namespace skillminer {

struct Embedding {
  std::vector<double> values;

  size_t dimension() const { return values.size(); }
  bool operator==(const Embedding &) const = default;
};

// Word vectors plus raw corpus counts. Words keep their file order.
class VectorStore {
 public:
  VectorStore() = default;
  explicit VectorStore(int dimension);

  int dimension() const { return dimension_; }
  size_t size() const { return words_.size(); }
  const std::vector<std::string> &words() const { return words_; }

  // Replaces an existing vector in place. Returns false if the word was new.
  bool set(const std::string &word, std::vector<double> values);
  const std::vector<double> *find(std::string_view word) const;

  void set_frequency(const std::string &word, double count);
  // Copies the unigram counts of a corpus.
  void set_frequencies(const CorpusStats &stats);
  double frequency(std::string_view word) const;
  double total_frequency() const { return total_frequency_; }

 private:
  int dimension_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, size_t> index_;
  std::vector<std::vector<double>> vectors_;
  std::unordered_map<std::string, double> frequencies_;
  double total_frequency_ = 0;
};

// word2vec text format: header "N D", then N rows "word x1 ... xD".
// Duplicate words: the last row wins and a warning is appended.
VectorStore parse_vectors(std::string_view content,
                          std::vector<std::string> *warnings = nullptr);
VectorStore load_vectors(const std::string &path,
                         std::vector<std::string> *warnings = nullptr);
std::string format_vectors(const VectorStore &store);

// word<TAB>count lines.
void parse_frequencies(std::string_view content, VectorStore &store);

enum class OovPolicy { kSkip, kZero };
enum class FrequencyMode { kRaw, kRelative };

struct SifConfig {
  double a = 1e-3;
  bool remove_common_component = false;
  OovPolicy oov_policy = OovPolicy::kSkip;
  FrequencyMode frequency_mode = FrequencyMode::kRaw;

  // Throws for a <= 0; returns a warning when a lies outside [1e-4, 1e-3].
  std::optional<std::string> validate() const;
};

double sif_weight(const VectorStore &store, const SifConfig &config,
                  std::string_view word);

// Anything that maps a token sequence into a fixed-dimension space.
class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  virtual int dimension() const = 0;
  // nullopt when no token can be embedded.
  virtual std::optional<Embedding> try_embed(
      std::span<const std::string> tokens) const = 0;

  Embedding embed(std::span<const std::string> tokens) const;
};

// Smooth-inverse-frequency average of word vectors:
// (1/|s|) * sum_w a/(a + f_w) * v_w. Tokens are looked up verbatim, then
// lowercased, then (for underscore-joined units) part by part.
class SifEmbedder : public TextEmbedder {
 public:
  SifEmbedder(const VectorStore &store, SifConfig config);

  int dimension() const override { return store_.dimension(); }
  std::optional<Embedding> try_embed(
      std::span<const std::string> tokens) const override;

  // Estimates the first principal direction of the given sentences'
  // embeddings; used when remove_common_component is set.
  void fit_common_component(
      const std::vector<std::vector<std::string>> &sentences);
  const std::vector<double> &common_component() const { return common_; }

  const SifConfig &config() const { return config_; }

 private:
  std::optional<Embedding> average(std::span<const std::string> tokens) const;

  const VectorStore &store_;
  SifConfig config_;
  std::vector<double> common_;
};

// x.y / (|x||y|), 0 when either norm is 0, clamped to [-1, 1].
double cosine(const Embedding &x, const Embedding &y);

// Scaled to unit length; the zero vector is returned unchanged.
Embedding normalized(Embedding e);

}  // namespace skillminer

#endif  // SKILLMINER_EMBEDDING_H_
