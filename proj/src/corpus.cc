#include "skillminer/corpus.h"

#include <algorithm>
#include <map>
#include <unordered_set>

#include <json.hpp>

#include "skillminer/common.h"
#include "skillminer/text.h"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace skillminer {

using json = nlohmann::json;

namespace {

constexpr const char *kSectionNames[] = {
    "title", "description", "compensation", "requirements",
    "about_company", "contact", "other",
};

bool is_opening(char32_t cp, bool *quote, bool *bracket) {
  *quote = cp == '"' || cp == 0x201C || cp == 0x2018 || cp == 0xAB;
  *bracket = cp == '(' || cp == '[' || cp == '{';
  return *quote || *bracket;
}

bool is_closing(char32_t cp, bool *quote, bool *bracket) {
  *quote = cp == '"' || cp == 0x201D || cp == 0x2019 || cp == 0xBB;
  *bracket = cp == ')' || cp == ']' || cp == '}';
  return *quote || *bracket;
}

bool is_clause_punct(char32_t cp) {
  return cp == ',' || cp == ';' || cp == ':' || cp == '.' || cp == '!' ||
         cp == '?' || cp == 0x2026;
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

// Splits a sentence into tokens while tracking quote and bracket nesting.
TokenizedSentence split_tokens(std::string_view sentence) {
  TokenizedSentence out;
  bool in_quote = false;
  int bracket_depth = 0;
  for (const std::string &raw : text::split_whitespace(sentence)) {
    std::u32string cps = text::decode_utf8(raw);
    size_t begin = 0;
    size_t end = cps.size();
    bool quote = false, bracket = false;
    while (begin < end && is_opening(cps[begin], &quote, &bracket)) {
      // A bare straight quote inside an open quotation closes it.
      if (quote) in_quote = !(in_quote && cps[begin] == '"' && end - begin == 1);
      if (bracket) ++bracket_depth;
      ++begin;
    }
    int closing_quotes = 0;
    int closing_brackets = 0;
    while (end > begin) {
      char32_t cp = cps[end - 1];
      if (is_closing(cp, &quote, &bracket)) {
        if (quote) ++closing_quotes;
        if (bracket) ++closing_brackets;
      } else if (!is_clause_punct(cp)) {
        break;
      }
      --end;
    }
    if (end > begin) {
      Token token;
      token.surface = text::encode_utf8(cps.substr(begin, end - begin));
      token.key = text::to_lower(token.surface);
      token.quoted = in_quote;
      token.bracketed = bracket_depth > 0;
      out.tokens.push_back(std::move(token));
    }
    if (closing_quotes > 0) in_quote = false;
    bracket_depth = std::max(0, bracket_depth - closing_brackets);
  }
  return out;
}

void count_document(const Document &doc, int max_n,
                    std::unordered_map<std::string, uint64_t> &counts,
                    std::unordered_map<std::string, uint64_t> &doc_freq,
                    uint64_t &total_tokens) {
  std::unordered_set<std::string> seen;
  for (const Section &section : doc.sections) {
    for (const TokenizedSentence &sentence : section.sentences) {
      std::vector<std::string> keys = sentence.keys();
      total_tokens += keys.size();
      for (size_t i = 0; i < keys.size(); ++i) {
        std::string key;
        for (size_t n = 1; n <= static_cast<size_t>(max_n) &&
                           i + n <= keys.size();
             ++n) {
          if (n > 1) key.push_back(' ');
          key.append(keys[i + n - 1]);
          ++counts[key];
          seen.insert(key);
        }
      }
    }
  }
  for (const std::string &key : seen) ++doc_freq[key];
}

uint64_t lookup(const std::unordered_map<std::string, uint64_t> &map,
                std::string_view key) {
  auto it = map.find(std::string(key));
  return it == map.end() ? 0 : it->second;
}

}  // namespace

const char *section_kind_name(SectionKind kind) {
  return kSectionNames[static_cast<int>(kind)];
}

SectionKind parse_section_kind(std::string_view name) {
  for (int i = 0; i < 7; ++i) {
    if (name == kSectionNames[i]) return static_cast<SectionKind>(i);
  }
  return SectionKind::kOther;
}

std::vector<std::string> TokenizedSentence::keys() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token &token : tokens) out.push_back(token.key);
  return out;
}

std::vector<std::string> Section::keys() const {
  std::vector<std::string> out;
  for (const TokenizedSentence &sentence : sentences) {
    for (const Token &token : sentence.tokens) out.push_back(token.key);
  }
  return out;
}

std::vector<TokenizedSentence> DefaultTokenizer::split(
    std::string_view text) const {
  std::vector<TokenizedSentence> sentences;
  auto flush = [&](size_t begin, size_t end) {
    if (end <= begin) return;
    TokenizedSentence sentence = split_tokens(text.substr(begin, end - begin));
    if (!sentence.tokens.empty()) sentences.push_back(std::move(sentence));
  };
  size_t start = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n') {
      flush(start, i);
      start = i + 1;
    } else if (is_terminator(c) &&
               (i + 1 == text.size() || is_ascii_space(text[i + 1]) ||
                text[i + 1] == '\n')) {
      flush(start, i);
      start = i + 1;
    }
  }
  flush(start, text.size());
  return sentences;
}

void tokenize(Section &section, const Tokenizer &tokenizer) {
  section.sentences = tokenizer.split(section.text);
  if (section.pos_tags.empty()) return;
  size_t total = 0;
  for (const TokenizedSentence &sentence : section.sentences) {
    total += sentence.tokens.size();
  }
  if (total != section.pos_tags.size()) {
    throw Error(ErrorKind::kInput,
                "section has " + std::to_string(section.pos_tags.size()) +
                    " POS tags for " + std::to_string(total) + " tokens");
  }
  size_t next = 0;
  for (TokenizedSentence &sentence : section.sentences) {
    for (Token &token : sentence.tokens) token.pos_tag = section.pos_tags[next++];
  }
}

void tokenize(std::vector<Document> &docs, const Tokenizer &tokenizer) {
  for (Document &doc : docs) {
    for (Section &section : doc.sections) tokenize(section, tokenizer);
  }
}

std::string ngram_key(const std::vector<std::string> &keys, size_t begin,
                      size_t end) {
  std::string out;
  for (size_t i = begin; i < end; ++i) {
    if (i > begin) out.push_back(' ');
    out.append(keys[i]);
  }
  return out;
}

size_t ngram_length(std::string_view key) {
  if (key.empty()) return 0;
  return static_cast<size_t>(std::count(key.begin(), key.end(), ' ')) + 1;
}

CorpusStats::CorpusStats(int max_n) : max_n_(max_n) {
  if (max_n < 1) throw Error(ErrorKind::kConfig, "max_n must be >= 1");
}

uint64_t CorpusStats::count(std::string_view ngram) const {
  return lookup(counts_, ngram);
}

uint64_t CorpusStats::doc_frequency(std::string_view ngram) const {
  return lookup(doc_freq_, ngram);
}

uint64_t CorpusStats::word_count(std::string_view word) const {
  return lookup(word_counts_, word);
}

uint64_t CorpusStats::order_mass(size_t n) const {
  return n < order_mass_.size() ? order_mass_[n] : 0;
}

void CorpusStats::add_document(const Document &doc) {
  std::unordered_map<std::string, uint64_t> counts;
  std::unordered_map<std::string, uint64_t> doc_freq;
  uint64_t tokens = 0;
  count_document(doc, max_n_, counts, doc_freq, tokens);
  CorpusStats shard(max_n_);
  shard.num_docs_ = 1;
  shard.total_tokens_ = tokens;
  shard.counts_ = std::move(counts);
  shard.doc_freq_ = std::move(doc_freq);
  shard.order_mass_.assign(static_cast<size_t>(max_n_) + 1, 0);
  for (const auto &[key, value] : shard.counts_) {
    size_t n = ngram_length(key);
    shard.order_mass_[n] += value;
    if (n == 1) shard.word_counts_[key] = value;
  }
  merge(shard);
}

void CorpusStats::merge(const CorpusStats &other) {
  if (other.max_n_ != max_n_) {
    throw Error(ErrorKind::kConfig, "cannot merge stats with different max_n");
  }
  num_docs_ += other.num_docs_;
  total_tokens_ += other.total_tokens_;
  for (const auto &[key, value] : other.counts_) counts_[key] += value;
  for (const auto &[key, value] : other.doc_freq_) doc_freq_[key] += value;
  for (const auto &[key, value] : other.word_counts_) word_counts_[key] += value;
  if (order_mass_.size() < other.order_mass_.size()) {
    order_mass_.resize(other.order_mass_.size(), 0);
  }
  for (size_t n = 0; n < other.order_mass_.size(); ++n) {
    order_mass_[n] += other.order_mass_[n];
  }
}

void CorpusStats::merge(CorpusStats &&other) {
  if (other.max_n_ == max_n_ && num_docs_ == 0 && counts_.empty()) {
    *this = std::move(other);
    return;
  }
  merge(static_cast<const CorpusStats &>(other));
}

bool CorpusStats::operator==(const CorpusStats &other) const {
  auto trimmed = [](std::vector<uint64_t> v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
    return v;
  };
  return max_n_ == other.max_n_ && num_docs_ == other.num_docs_ &&
         total_tokens_ == other.total_tokens_ && counts_ == other.counts_ &&
         doc_freq_ == other.doc_freq_ && word_counts_ == other.word_counts_ &&
         trimmed(order_mass_) == trimmed(other.order_mass_);
}

CorpusStats count_ngrams_serial(const std::vector<Document> &docs, int max_n) {
  CorpusStats stats(max_n);
  for (const Document &doc : docs) stats.add_document(doc);
  return stats;
}

CorpusStats count_ngrams(const std::vector<Document> &docs, int max_n) {
  CorpusStats stats(max_n);
  const long n_docs = static_cast<long>(docs.size());
#pragma omp parallel
  {
    CorpusStats local(max_n);
#pragma omp for schedule(dynamic, 16) nowait
    for (long i = 0; i < n_docs; ++i) local.add_document(docs[i]);
#pragma omp critical(skillminer_count_merge)
    stats.merge(std::move(local));
  }
  return stats;
}

double popularity(const CorpusStats &stats, std::string_view ngram) {
  uint64_t count = stats.count(ngram);
  if (count == 0) return 0.0;
  return static_cast<double>(count) /
         static_cast<double>(stats.order_mass(ngram_length(ngram)));
}

std::vector<Document> parse_corpus(std::string_view content) {
  std::vector<Document> docs;
  std::unordered_set<std::string> ids;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    const std::string where = "corpus line " + std::to_string(line_no);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error &e) {
      throw Error(ErrorKind::kInput, where + ": malformed JSON: " + e.what());
    }
    if (!record.is_object() || !record.contains("id") ||
        !record["id"].is_string() || !record.contains("sections") ||
        !record["sections"].is_array()) {
      throw Error(ErrorKind::kInput,
                  where + ": expected object with string id and sections array");
    }
    Document doc;
    doc.id = record["id"].get<std::string>();
    if (doc.id.empty()) throw Error(ErrorKind::kInput, where + ": empty id");
    if (!ids.insert(doc.id).second) {
      throw Error(ErrorKind::kInput, where + ": duplicate id '" + doc.id + "'");
    }
    for (const json &item : record["sections"]) {
      if (!item.is_object() || !item.contains("text") ||
          !item["text"].is_string()) {
        throw Error(ErrorKind::kInput, where + ": section without text");
      }
      Section section;
      if (item.contains("kind") && item["kind"].is_string()) {
        section.kind = parse_section_kind(item["kind"].get<std::string>());
      }
      section.text = item["text"].get<std::string>();
      if (item.contains("pos")) {
        if (!item["pos"].is_array()) {
          throw Error(ErrorKind::kInput, where + ": pos must be an array");
        }
        for (const json &tag : item["pos"]) {
          section.pos_tags.push_back(tag.get<std::string>());
        }
      }
      doc.sections.push_back(std::move(section));
    }
    if (doc.sections.empty()) {
      throw Error(ErrorKind::kInput, where + ": document has no sections");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> load_corpus(const std::string &path) {
  return parse_corpus(read_file(path));
}

std::string format_corpus(const std::vector<Document> &docs) {
  std::string out;
  for (const Document &doc : docs) {
    json record;
    record["id"] = doc.id;
    record["sections"] = json::array();
    for (const Section &section : doc.sections) {
      json item;
      item["kind"] = section_kind_name(section.kind);
      item["text"] = section.text;
      if (!section.pos_tags.empty()) item["pos"] = section.pos_tags;
      record["sections"].push_back(std::move(item));
    }
    out += record.dump(-1, ' ', false, json::error_handler_t::replace);
    out.push_back('\n');
  }
  return out;
}

void save_corpus(const std::string &path, const std::vector<Document> &docs) {
  write_file(path, format_corpus(docs));
}

std::string stats_to_json(const CorpusStats &stats) {
  std::map<std::string, std::pair<uint64_t, uint64_t>> sorted;
  for (const auto &[key, value] : stats.ngram_counts()) {
    sorted[key] = {value, stats.doc_frequency(key)};
  }
  json entries = json::array();
  for (const auto &[key, value] : sorted) {
    entries.push_back(json::array({key, value.first, value.second}));
  }
  json root;
  root["format_version"] = kStatsFormatVersion;
  root["kind"] = "corpus_stats";
  root["max_n"] = stats.max_n();
  root["num_docs"] = stats.num_docs();
  root["total_token_occurrences"] = stats.total_token_occurrences();
  root["ngrams"] = std::move(entries);
  return root.dump(1, ' ', false, json::error_handler_t::replace) + "\n";
}

CorpusStats stats_from_json(std::string_view content) {
  json root;
  try {
    root = json::parse(content);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::kInput, std::string("stats artifact: ") + e.what());
  }
  if (root.value("kind", "") != "corpus_stats") {
    throw Error(ErrorKind::kInput, "not a corpus_stats artifact");
  }
  if (root.value("format_version", 0) != kStatsFormatVersion) {
    throw Error(ErrorKind::kInput, "unsupported corpus_stats format_version");
  }
  CorpusStats stats(root.at("max_n").get<int>());
  stats.num_docs_ = root.at("num_docs").get<uint64_t>();
  stats.total_tokens_ = root.at("total_token_occurrences").get<uint64_t>();
  stats.order_mass_.assign(static_cast<size_t>(stats.max_n_) + 1, 0);
  for (const json &entry : root.at("ngrams")) {
    std::string key = entry.at(0).get<std::string>();
    uint64_t count = entry.at(1).get<uint64_t>();
    uint64_t df = entry.at(2).get<uint64_t>();
    size_t n = ngram_length(key);
    if (n == 0 || n > static_cast<size_t>(stats.max_n_)) {
      throw Error(ErrorKind::kInput, "stats artifact: bad n-gram '" + key + "'");
    }
    stats.counts_[key] = count;
    stats.doc_freq_[key] = df;
    stats.order_mass_[n] += count;
    if (n == 1) stats.word_counts_[key] = count;
  }
  return stats;
}

}  // namespace skillminer
