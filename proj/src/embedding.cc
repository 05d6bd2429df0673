#include "skillminer/embedding.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "skillminer/common.h"
#include "skillminer/text.h"

namespace skillminer {

namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view field, double *value) {
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), *value);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(*value);
}

double dot(const std::vector<double> &x, const std::vector<double> &y) {
  double s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

VectorStore::VectorStore(int dimension) : dimension_(dimension) {
  if (dimension < 1) throw Error(ErrorKind::kData, "vector dimension must be >= 1");
}

bool VectorStore::set(const std::string &word, std::vector<double> values) {
  if (static_cast<int>(values.size()) != dimension_) {
    throw Error(ErrorKind::kData, "vector for '" + word + "' has wrong dimension");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kData, "vector for '" + word + "' is not finite");
    }
  }
  auto it = index_.find(word);
  if (it != index_.end()) {
    vectors_[it->second] = std::move(values);
    return true;
  }
  index_.emplace(word, words_.size());
  words_.push_back(word);
  vectors_.push_back(std::move(values));
  return false;
}

const std::vector<double> *VectorStore::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? nullptr : &vectors_[it->second];
}

void VectorStore::set_frequency(const std::string &word, double count) {
  if (!(count >= 0)) throw Error(ErrorKind::kData, "negative frequency for '" + word + "'");
  auto [it, inserted] = frequencies_.try_emplace(word, 0.0);
  total_frequency_ += count - it->second;
  it->second = count;
}

void VectorStore::set_frequencies(const CorpusStats &stats) {
  for (const auto &[word, count] : stats.word_counts()) {
    set_frequency(word, static_cast<double>(count));
  }
}

double VectorStore::frequency(std::string_view word) const {
  auto it = frequencies_.find(std::string(word));
  if (it != frequencies_.end()) return it->second;
  it = frequencies_.find(text::to_lower(word));
  return it == frequencies_.end() ? 0.0 : it->second;
}

VectorStore parse_vectors(std::string_view content,
                          std::vector<std::string> *warnings) {
  size_t pos = 0;
  size_t line_no = 0;
  auto next_line = [&](std::string_view *line) {
    while (pos < content.size()) {
      size_t end = content.find('\n', pos);
      if (end == std::string_view::npos) end = content.size();
      *line = content.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!line->empty() && line->back() == '\r') line->remove_suffix(1);
      if (!line->empty()) return true;
    }
    return false;
  };
  auto fail = [&](const std::string &message) {
    return Error(ErrorKind::kInput,
                 "vectors line " + std::to_string(line_no) + ": " + message);
  };

  std::string_view line;
  if (!next_line(&line)) throw Error(ErrorKind::kInput, "vectors: empty file");
  auto header = split_spaces(line);
  size_t count = 0;
  int dim = 0;
  if (header.size() != 2 ||
      std::from_chars(header[0].data(), header[0].data() + header[0].size(), count).ec !=
          std::errc() ||
      std::from_chars(header[1].data(), header[1].data() + header[1].size(), dim).ec !=
          std::errc() ||
      dim < 1) {
    throw fail("expected header \"N D\"");
  }
  VectorStore store(dim);
  for (size_t row = 0; row < count; ++row) {
    if (!next_line(&line)) {
      throw Error(ErrorKind::kInput, "vectors: header promises " + std::to_string(count) +
                                         " rows, found " + std::to_string(row));
    }
    auto fields = split_spaces(line);
    if (fields.size() != static_cast<size_t>(dim) + 1) {
      throw fail("expected word and " + std::to_string(dim) + " values, got " +
                 std::to_string(fields.size() ? fields.size() - 1 : 0) + " values");
    }
    std::vector<double> values(static_cast<size_t>(dim));
    for (int k = 0; k < dim; ++k) {
      if (!parse_double(fields[k + 1], &values[k])) {
        throw fail("bad value '" + std::string(fields[k + 1]) + "'");
      }
    }
    std::string word(fields[0]);
    if (store.set(word, std::move(values)) && warnings != nullptr) {
      warnings->push_back("vectors line " + std::to_string(line_no) +
                          ": duplicate word '" + word + "', keeping the last row");
    }
  }
  if (next_line(&line)) throw fail("more rows than the header declares");
  return store;
}

VectorStore load_vectors(const std::string &path, std::vector<std::string> *warnings) {
  return parse_vectors(read_file(path), warnings);
}

std::string format_vectors(const VectorStore &store) {
  std::string out = std::to_string(store.size()) + " " + std::to_string(store.dimension()) + "\n";
  for (const std::string &word : store.words()) {
    out += word;
    for (double v : *store.find(word)) {
      out.push_back(' ');
      out += format_double(v);
    }
    out.push_back('\n');
  }
  return out;
}

void parse_frequencies(std::string_view content, VectorStore &store) {
  size_t pos = 0;
  size_t line_no = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    double count = 0;
    if (tab == std::string_view::npos || !parse_double(line.substr(tab + 1), &count) ||
        count < 0) {
      throw Error(ErrorKind::kInput,
                  "frequency line " + std::to_string(line_no) + ": expected word<TAB>count");
    }
    store.set_frequency(std::string(line.substr(0, tab)), count);
  }
}

std::optional<std::string> SifConfig::validate() const {
  if (!(a > 0) || !std::isfinite(a)) {
    throw Error(ErrorKind::kConfig, "SIF parameter a must be positive");
  }
  if (a < 1e-4 || a > 1e-3) {
    return "SIF parameter a=" + format_double(a) + " lies outside [1e-4, 1e-3]";
  }
  return std::nullopt;
}

double sif_weight(const VectorStore &store, const SifConfig &config,
                  std::string_view word) {
  double f = store.frequency(word);
  if (config.frequency_mode == FrequencyMode::kRelative && store.total_frequency() > 0) {
    f /= store.total_frequency();
  }
  return config.a / (config.a + f);
}

Embedding TextEmbedder::embed(std::span<const std::string> tokens) const {
  std::optional<Embedding> e = try_embed(tokens);
  if (!e) throw Error(ErrorKind::kData, "no token of the text has a vector");
  return std::move(*e);
}

SifEmbedder::SifEmbedder(const VectorStore &store, SifConfig config)
    : store_(store), config_(config) {
  config_.validate();
  if (store.dimension() < 1) throw Error(ErrorKind::kData, "empty vector store");
}

std::optional<Embedding> SifEmbedder::average(std::span<const std::string> tokens) const {
  const size_t dim = static_cast<size_t>(store_.dimension());
  Embedding out{std::vector<double>(dim, 0.0)};
  size_t used = 0;
  auto add = [&](const std::string &word, const std::vector<double> &v) {
    double w = sif_weight(store_, config_, word);
    for (size_t k = 0; k < dim; ++k) out.values[k] += w * v[k];
    ++used;
  };
  for (const std::string &token : tokens) {
    if (const auto *v = store_.find(token)) {
      add(token, *v);
      continue;
    }
    std::string lower = text::to_lower(token);
    if (const auto *v = store_.find(lower)) {
      add(lower, *v);
      continue;
    }
    bool expanded = false;
    if (token.find('_') != std::string::npos) {
      std::string part;
      std::vector<std::string> parts;
      for (char c : lower) {
        if (c == '_') {
          if (!part.empty()) parts.push_back(std::move(part));
          part.clear();
        } else {
          part.push_back(c);
        }
      }
      if (!part.empty()) parts.push_back(std::move(part));
      for (const std::string &p : parts) {
        if (const auto *v = store_.find(p)) {
          add(p, *v);
          expanded = true;
        } else if (config_.oov_policy == OovPolicy::kZero) {
          ++used;
          expanded = true;
        }
      }
    }
    if (!expanded && config_.oov_policy == OovPolicy::kZero) ++used;
  }
  if (used == 0) return std::nullopt;
  for (double &x : out.values) x /= static_cast<double>(used);
  return out;
}

std::optional<Embedding> SifEmbedder::try_embed(std::span<const std::string> tokens) const {
  std::optional<Embedding> e = average(tokens);
  if (e && config_.remove_common_component && !common_.empty()) {
    double proj = dot(e->values, common_);
    for (size_t k = 0; k < common_.size(); ++k) e->values[k] -= proj * common_[k];
  }
  return e;
}

void SifEmbedder::fit_common_component(
    const std::vector<std::vector<std::string>> &sentences) {
  std::vector<std::vector<double>> rows;
  for (const auto &sentence : sentences) {
    if (auto e = average(sentence)) rows.push_back(std::move(e->values));
  }
  common_.clear();
  if (rows.empty()) return;
  const size_t dim = static_cast<size_t>(store_.dimension());
  std::vector<double> u(dim, 0.0);
  for (const auto &r : rows) {
    for (size_t k = 0; k < dim; ++k) u[k] += r[k];
  }
  if (dot(u, u) == 0) u[0] = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<double> next(dim, 0.0);
    for (const auto &r : rows) {
      double p = dot(r, u);
      for (size_t k = 0; k < dim; ++k) next[k] += p * r[k];
    }
    double norm = std::sqrt(dot(next, next));
    if (norm == 0) return;
    for (double &x : next) x /= norm;
    double change = 0;
    for (size_t k = 0; k < dim; ++k) change = std::max(change, std::abs(next[k] - u[k]));
    u = std::move(next);
    if (change < 1e-12) break;
  }
  common_ = std::move(u);
}

double cosine(const Embedding &x, const Embedding &y) {
  if (x.dimension() != y.dimension()) {
    throw Error(ErrorKind::kData, "cosine: dimension mismatch (" +
                                      std::to_string(x.dimension()) + " vs " +
                                      std::to_string(y.dimension()) + ")");
  }
  double xy = dot(x.values, y.values);
  double xx = dot(x.values, x.values);
  double yy = dot(y.values, y.values);
  if (xx == 0 || yy == 0) return 0.0;
  double c = xy / std::sqrt(xx * yy);
  return std::clamp(c, -1.0, 1.0);
}

Embedding normalized(Embedding e) {
  double norm = std::sqrt(dot(e.values, e.values));
  if (norm > 0) {
    for (double &x : e.values) x /= norm;
  }
  return e;
}

}  // namespace skillminer
