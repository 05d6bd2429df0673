#include "skillminer/phrase_miner.h"

#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "skillminer/common.h"

namespace skillminer {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  size_t pos = 0;
  while (true) {
    size_t tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

template <typename T>
T parse_number(std::string_view field, size_t line_no, const char *what) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorKind::kInput, std::string(what) + " line " +
                                       std::to_string(line_no) + ": bad number '" +
                                       std::string(field) + "'");
  }
  return value;
}

template <typename Fn>
void for_each_line(std::string_view content, Fn fn) {
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
    fn(line, line_no);
  }
}

std::vector<CandidateRow> drop_and_refeaturize(
    const CorpusStats &stats, std::vector<CandidateRow> rows,
    const std::unordered_map<std::string, uint64_t> &segment_counts,
    const ContextTable &contexts, const WordSet &stopwords) {
  std::vector<PhraseCandidate> survivors;
  survivors.reserve(rows.size());
  for (CandidateRow &row : rows) {
    auto it = segment_counts.find(row.candidate.phrase);
    uint64_t rectified = it == segment_counts.end() ? 0 : it->second;
    if (rectified == 0) continue;
    row.candidate.rectified_frequency = rectified;
    survivors.push_back(row.candidate);
  }
  return compute_all_features(stats, survivors, contexts, stopwords);
}

}  // namespace

EnsembleConfig MinerConfig::ensemble(int iteration) const {
  EnsembleConfig config;
  config.num_trees = num_trees;
  config.subsample_size = subsample_size;
  config.max_depth = max_depth;
  config.seed = derive_seed(seed, "phrase_miner", static_cast<uint64_t>(iteration));
  return config;
}

void MinerConfig::validate() const {
  if (min_support < 1) throw Error(ErrorKind::kConfig, "min_support must be >= 1");
  if (max_n < 1) throw Error(ErrorKind::kConfig, "max_n must be >= 1");
  if (num_trees < 1) throw Error(ErrorKind::kConfig, "num_trees must be >= 1");
  if (max_depth < 1) throw Error(ErrorKind::kConfig, "max_depth must be >= 1");
  if (subsample_size < 0) throw Error(ErrorKind::kConfig, "subsample_size must be >= 0");
  if (iterations < 1) throw Error(ErrorKind::kConfig, "iterations must be >= 1");
  if (!(unigram_floor > 0)) throw Error(ErrorKind::kConfig, "unigram_floor must be > 0");
}

RectifyResult rectify_and_retrain(const QualityModel &model,
                                  const CorpusStats &stats,
                                  std::vector<CandidateRow> rows,
                                  const std::vector<Document> &docs,
                                  const ContextTable &contexts,
                                  const WordSet &stopwords,
                                  const WordSet &positives,
                                  const MinerConfig &config) {
  config.validate();
  RectifyResult result{model, std::move(rows)};
  const std::vector<const TokenizedSentence *> sentences = all_sentences(docs);
  PosGuide guide;
  if (config.pos_guidance) guide = build_pos_guide(docs, positives, config.max_n);

  for (int iteration = 1; iteration <= config.iterations; ++iteration) {
    SegmentScorer scorer(stats, SegmentScorer::quality_table(result.model, result.rows),
                         config.max_n, config.unigram_floor,
                         config.pos_guidance ? &guide : nullptr);
    std::vector<SegmentationResult> segmentations = segment_sentences(scorer, sentences);

    std::unordered_map<std::string, uint64_t> segment_counts;
    for (size_t i = 0; i < sentences.size(); ++i) {
      for (const std::string &phrase : segmentations[i].phrases(*sentences[i])) {
        ++segment_counts[phrase];
      }
    }
    result.rows = drop_and_refeaturize(stats, std::move(result.rows),
                                       segment_counts, contexts, stopwords);
    result.model = train_quality_model(positives, result.rows, config.ensemble(iteration));
  }
  for (CandidateRow &row : result.rows) row.quality = result.model.quality(row.features);
  return result;
}

std::vector<MinedPhrase> select_phrases(const std::vector<CandidateRow> &rows,
                                        double threshold) {
  std::vector<MinedPhrase> out;
  for (const CandidateRow &row : rows) {
    if (row.quality >= threshold) out.push_back({row.candidate.phrase, row.quality});
  }
  std::sort(out.begin(), out.end(), [](const MinedPhrase &a, const MinedPhrase &b) {
    if (a.quality != b.quality) return a.quality > b.quality;
    return a.phrase < b.phrase;
  });
  return out;
}

MiningResult mine_phrases(const std::vector<Document> &docs,
                          const WordSet &positives, const WordSet &stopwords,
                          const MinerConfig &config) {
  config.validate();
  MiningResult result;
  result.stats = count_ngrams(docs, config.max_n);
  std::vector<PhraseCandidate> candidates =
      extract_candidates(result.stats, config.min_support, config.max_n);
  ContextTable contexts = collect_contexts(docs, candidates, config.max_n);
  std::vector<CandidateRow> rows =
      compute_all_features(result.stats, candidates, contexts, stopwords);
  QualityModel initial = train_quality_model(positives, rows, config.ensemble(0));
  RectifyResult rectified = rectify_and_retrain(initial, result.stats, std::move(rows),
                                                docs, contexts, stopwords, positives,
                                                config);
  result.model = std::move(rectified.model);
  result.rows = std::move(rectified.rows);
  result.phrases = select_phrases(result.rows, config.quality_threshold);
  return result;
}

std::string format_mined_phrases(const std::vector<MinedPhrase> &phrases) {
  std::string out;
  for (const MinedPhrase &p : phrases) {
    out += p.phrase;
    out.push_back('\t');
    out += format_double(p.quality);
    out.push_back('\n');
  }
  return out;
}

std::vector<MinedPhrase> parse_mined_phrases(std::string_view content) {
  std::vector<MinedPhrase> out;
  for_each_line(content, [&](std::string_view line, size_t line_no) {
    auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw Error(ErrorKind::kInput,
                  "phrase list line " + std::to_string(line_no) + ": expected 2 fields");
    }
    out.push_back({std::string(fields[0]),
                   parse_number<double>(fields[1], line_no, "phrase list")});
  });
  return out;
}

std::string format_candidate_rows(const std::vector<CandidateRow> &rows) {
  std::string out = "phrase\tfrequency\trectified_frequency";
  for (const std::string &name : PhraseFeatures::names()) out += "\t" + name;
  out += "\n";
  for (const CandidateRow &row : rows) {
    out += row.candidate.phrase;
    out += "\t" + std::to_string(row.candidate.frequency);
    out += "\t" + std::to_string(row.candidate.rectified_frequency);
    for (double v : row.features.values()) out += "\t" + format_double(v);
    out += "\n";
  }
  return out;
}

std::vector<CandidateRow> parse_candidate_rows(std::string_view content) {
  std::vector<CandidateRow> out;
  for_each_line(content, [&](std::string_view line, size_t line_no) {
    if (line_no == 1 && line.substr(0, 7) == "phrase\t") return;
    auto fields = split_tabs(line);
    if (fields.size() != 3 + kNumPhraseFeatures) {
      throw Error(ErrorKind::kInput, "candidate table line " + std::to_string(line_no) +
                                         ": expected " +
                                         std::to_string(3 + kNumPhraseFeatures) + " fields");
    }
    CandidateRow row;
    row.candidate.phrase = std::string(fields[0]);
    row.candidate.frequency = parse_number<uint64_t>(fields[1], line_no, "candidate table");
    row.candidate.rectified_frequency =
        parse_number<uint64_t>(fields[2], line_no, "candidate table");
    FeatureVector v{};
    for (size_t k = 0; k < kNumPhraseFeatures; ++k) {
      v[k] = parse_number<double>(fields[3 + k], line_no, "candidate table");
    }
    row.features = {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
    out.push_back(std::move(row));
  });
  return out;
}

}  // namespace skillminer
