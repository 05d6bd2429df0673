#include "skillminer/phrase_features.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skillminer/common.h"
#include "skillminer/text.h"

namespace skillminer {

namespace {

void scan_document(const Document &doc, const std::unordered_set<std::string> &keys,
                   int max_n, ContextTable &table) {
  for (const Section &section : doc.sections) {
    for (const TokenizedSentence &sentence : section.sentences) {
      const auto &tokens = sentence.tokens;
      for (size_t i = 0; i < tokens.size(); ++i) {
        std::string key;
        bool quoted = true, bracketed = true;
        for (size_t n = 1; n <= static_cast<size_t>(max_n) &&
                           i + n <= tokens.size();
             ++n) {
          const Token &token = tokens[i + n - 1];
          if (n > 1) key.push_back(' ');
          key.append(token.key);
          quoted = quoted && token.quoted;
          bracketed = bracketed && token.bracketed;
          if (!keys.count(key)) continue;
          OccurrenceContext &ctx = table[key];
          ++ctx.occurrences;
          if (quoted) ++ctx.quoted;
          if (bracketed) ++ctx.bracketed;
          if (text::starts_with_upper(tokens[i].surface)) ++ctx.capitalized;
        }
      }
    }
  }
}

std::unordered_set<std::string> key_set(
    const std::vector<PhraseCandidate> &candidates) {
  std::unordered_set<std::string> keys;
  for (const PhraseCandidate &c : candidates) keys.insert(c.phrase);
  return keys;
}

double ratio(uint64_t part, uint64_t whole) {
  return whole == 0 ? 0.0 : static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

WordSet parse_phrase_list(std::string_view content) {
  WordSet out;
  size_t pos = 0;
  while (pos <= content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.front() == '#') continue;
    std::vector<std::string> words = text::split_whitespace(line);
    if (words.empty()) continue;
    out.insert(text::to_lower(text::join(words, " ")));
    if (end == content.size()) break;
  }
  return out;
}

WordSet load_phrase_list(const std::string &path) {
  return parse_phrase_list(read_file(path));
}

const std::array<std::string, kNumPhraseFeatures> &PhraseFeatures::names() {
  static const std::array<std::string, kNumPhraseFeatures> kNames = {
      "popularity", "pmi",          "pkl",          "has_stopword",
      "avg_idf",    "quote_prob",   "bracket_prob", "capitalized_prob"};
  return kNames;
}

std::vector<PhraseCandidate> extract_candidates(const CorpusStats &stats,
                                                uint64_t min_support,
                                                int max_n) {
  if (min_support < 1) throw Error(ErrorKind::kConfig, "min_support must be >= 1");
  if (max_n < 1) throw Error(ErrorKind::kConfig, "max_n must be >= 1");
  std::vector<PhraseCandidate> out;
  for (const auto &[key, count] : stats.ngram_counts()) {
    if (count < min_support) continue;
    if (ngram_length(key) > static_cast<size_t>(max_n)) continue;
    out.push_back({key, count, count});
  }
  std::sort(out.begin(), out.end(),
            [](const PhraseCandidate &a, const PhraseCandidate &b) {
              return a.phrase < b.phrase;
            });
  return out;
}

double pmi(double p_phrase, double p_left, double p_right) {
  if (p_left <= 0 || p_right <= 0) return std::numeric_limits<double>::infinity();
  return std::log(p_phrase / (p_left * p_right));
}

double pmi(const CorpusStats &stats, std::string_view left,
           std::string_view right) {
  std::string phrase = std::string(left) + " " + std::string(right);
  return pmi(popularity(stats, phrase), popularity(stats, left),
             popularity(stats, right));
}

double pkl(const CorpusStats &stats, std::string_view phrase,
           std::string_view left, std::string_view right) {
  double p = popularity(stats, phrase);
  if (p == 0) return 0.0;
  double pl = popularity(stats, left);
  double pr = popularity(stats, right);
  if (pl == 0 || pr == 0) {
    throw Error(ErrorKind::kData, "pkl: unseen part of '" + std::string(phrase) + "'");
  }
  return p * std::log(p / (pl * pr));
}

Split best_split(const CorpusStats &stats, std::string_view phrase) {
  std::vector<std::string> words = text::split_whitespace(phrase);
  if (words.size() < 2) {
    throw Error(ErrorKind::kData, "best_split needs a multiword phrase");
  }
  std::string key = text::join(words, " ");
  double p = popularity(stats, key);
  Split best;
  best.pmi = std::numeric_limits<double>::infinity();
  for (size_t k = 1; k < words.size(); ++k) {
    std::string left = ngram_key(words, 0, k);
    std::string right = ngram_key(words, k, words.size());
    double value = pmi(p, popularity(stats, left), popularity(stats, right));
    if (best.position == 0 || value < best.pmi) {
      best.position = k;
      best.left = std::move(left);
      best.right = std::move(right);
      best.pmi = value;
    }
  }
  return best;
}

void OccurrenceContext::merge(const OccurrenceContext &other) {
  occurrences += other.occurrences;
  quoted += other.quoted;
  bracketed += other.bracketed;
  capitalized += other.capitalized;
}

ContextTable collect_contexts_serial(
    const std::vector<Document> &docs,
    const std::vector<PhraseCandidate> &candidates, int max_n) {
  auto keys = key_set(candidates);
  ContextTable table;
  for (const Document &doc : docs) scan_document(doc, keys, max_n, table);
  return table;
}

ContextTable collect_contexts(const std::vector<Document> &docs,
                              const std::vector<PhraseCandidate> &candidates,
                              int max_n) {
  auto keys = key_set(candidates);
  ContextTable table;
  const long n_docs = static_cast<long>(docs.size());
#pragma omp parallel
  {
    ContextTable local;
#pragma omp for schedule(dynamic, 16) nowait
    for (long i = 0; i < n_docs; ++i) scan_document(docs[i], keys, max_n, local);
#pragma omp critical(skillminer_context_merge)
    for (const auto &[key, ctx] : local) table[key].merge(ctx);
  }
  return table;
}

PhraseFeatures compute_features(const CorpusStats &stats,
                                const PhraseCandidate &candidate,
                                const ContextTable &contexts,
                                const WordSet &stopwords) {
  PhraseFeatures f;
  std::vector<std::string> words = text::split_whitespace(candidate.phrase);
  const size_t n = words.size();
  const double mass = static_cast<double>(stats.order_mass(n));
  f.popularity =
      mass > 0 ? static_cast<double>(candidate.rectified_frequency) / mass : 0.0;

  if (n >= 2 && f.popularity > 0) {
    Split split = best_split(stats, candidate.phrase);
    double pl = popularity(stats, split.left);
    double pr = popularity(stats, split.right);
    if (pl > 0 && pr > 0) {
      f.pmi = pmi(f.popularity, pl, pr);
      f.pkl = f.popularity * f.pmi;
    }
  }

  double idf_sum = 0;
  for (const std::string &word : words) {
    if (stopwords.count(word)) f.has_stopword = 1;
    uint64_t df = stats.doc_frequency(word);
    if (df > 0 && stats.num_docs() > 0) {
      idf_sum += std::log(static_cast<double>(stats.num_docs()) /
                          static_cast<double>(df));
    }
  }
  f.avg_idf = n > 0 ? idf_sum / static_cast<double>(n) : 0.0;

  auto it = contexts.find(candidate.phrase);
  if (it != contexts.end()) {
    const OccurrenceContext &ctx = it->second;
    f.quote_prob = ratio(ctx.quoted, ctx.occurrences);
    f.bracket_prob = ratio(ctx.bracketed, ctx.occurrences);
    f.capitalized_prob = ratio(ctx.capitalized, ctx.occurrences);
  }
  return f;
}

std::vector<CandidateRow> compute_all_features(
    const CorpusStats &stats, const std::vector<PhraseCandidate> &candidates,
    const ContextTable &contexts, const WordSet &stopwords) {
  std::vector<CandidateRow> rows(candidates.size());
  const long n = static_cast<long>(candidates.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < n; ++i) {
    rows[i].candidate = candidates[i];
    rows[i].features = compute_features(stats, candidates[i], contexts, stopwords);
  }
  return rows;
}

}  // namespace skillminer
