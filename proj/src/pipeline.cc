#include "skillminer/pipeline.h"

#include <cstdio>
#include <set>

#include <json.hpp>

#include "skillminer/common.h"
#include "skillminer/ranker.h"
#include "skillminer/text.h"

namespace skillminer {

using json = nlohmann::json;

namespace {

void reject_unknown(const json &object, const std::set<std::string> &known,
                    const std::string &where) {
  for (const auto &item : object.items()) {
    if (!known.count(item.key())) {
      throw Error(ErrorKind::kConfig, "unknown config key '" + where + item.key() + "'");
    }
  }
}

template <typename T>
void read_key(const json &object, const char *key, T &value) {
  if (!object.contains(key)) return;
  try {
    value = object.at(key).get<T>();
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kConfig, std::string("config key '") + key + "': " + e.what());
  }
}

const char *oov_name(OovPolicy p) { return p == OovPolicy::kSkip ? "skip" : "zero"; }
const char *frequency_mode_name(FrequencyMode m) {
  return m == FrequencyMode::kRaw ? "raw" : "relative";
}

bool section_selected(const Section &section, const PipelineConfig &config) {
  return config.rank_all_sections || section.kind == SectionKind::kRequirements;
}

std::vector<Extraction> extract_document(const Document &doc, const SegmentScorer &scorer,
                                         const std::unordered_map<std::string, double> &unigram_quality,
                                         const ExtractionContext &context, PipelineMode mode,
                                         const PipelineConfig &config) {
  std::vector<Extraction> out;
  const double threshold = config.miner.quality_threshold;
  for (size_t s = 0; s < doc.sections.size(); ++s) {
    const Section &section = doc.sections[s];
    if (!section_selected(section, config)) continue;

    std::vector<std::string> phrases;
    std::unordered_map<std::string, double> quality;
    for (const TokenizedSentence &sentence : section.sentences) {
      SegmentationResult seg = segment_sentence(scorer, sentence);
      for (const std::string &phrase : seg.phrases(sentence)) {
        double q = 0;
        if (ngram_length(phrase) == 1) {
          auto it = unigram_quality.find(phrase);
          q = it == unigram_quality.end() ? 0.0 : it->second;
        } else {
          q = scorer.quality(phrase);
        }
        if (q < threshold || quality.count(phrase)) continue;
        quality.emplace(phrase, q);
        phrases.push_back(phrase);
      }
    }
    if (phrases.empty()) continue;

    std::vector<Extraction> items;
    if (uses_ranking(mode)) {
      std::optional<Embedding> ctx = context.embedder->try_embed(section.keys());
      if (!ctx) continue;
      for (const RankedPhrase &r :
           filter_by_threshold(rank_phrases(*context.embedder, phrases, section, doc.id, s),
                               config.rank_threshold)) {
        items.push_back({doc.id, s, r.phrase, quality[r.phrase], r.score, std::nullopt});
      }
    } else {
      for (const std::string &phrase : phrases) {
        items.push_back({doc.id, s, phrase, quality[phrase], std::nullopt, std::nullopt});
      }
    }
    if (uses_classifier(mode)) {
      std::vector<Extraction> kept;
      for (Extraction &item : items) {
        std::optional<Embedding> v =
            context.embedder->try_embed(text::split_whitespace(item.phrase));
        if (!v) continue;
        SkillPrediction p =
            context.classifier->predict(normalized(std::move(*v)), config.decision_threshold);
        if (!p.is_skill) continue;
        item.skill_probability = p.probability;
        kept.push_back(std::move(item));
      }
      items = std::move(kept);
    }
    for (Extraction &item : items) out.push_back(std::move(item));
  }
  return out;
}

void check_context(const ExtractionContext &context, PipelineMode mode) {
  if (!context.stats || !context.model || !context.rows) {
    throw Error(ErrorKind::kState, "no phrase quality model; run mine first");
  }
  if ((uses_ranking(mode) || uses_classifier(mode)) && !context.embedder) {
    throw Error(ErrorKind::kState, std::string("mode ") + mode_name(mode) +
                                       " needs word vectors for the embedding layer");
  }
  if (uses_classifier(mode) && !context.classifier) {
    throw Error(ErrorKind::kState, std::string("mode ") + mode_name(mode) +
                                       " needs a skill classifier; run train-classifier first");
  }
}

struct ExtractionTables {
  std::unordered_map<std::string, double> multiword;
  std::unordered_map<std::string, double> unigram;
};

ExtractionTables quality_tables(const ExtractionContext &context) {
  ExtractionTables t;
  t.multiword = SegmentScorer::quality_table(*context.model, *context.rows);
  for (const CandidateRow &row : *context.rows) {
    if (row.candidate.length() == 1) {
      t.unigram[row.candidate.phrase] = context.model->quality(row.features);
    }
  }
  return t;
}

std::string format_optional(const std::optional<double> &v) {
  return v ? format_double(*v) : std::string("-");
}

}  // namespace

const char *mode_name(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::kM1: return "M1";
    case PipelineMode::kM2: return "M2";
    case PipelineMode::kM3: return "M3";
    case PipelineMode::kM4: return "M4";
  }
  return "?";
}

PipelineMode parse_mode(std::string_view name) {
  if (name == "M1" || name == "m1") return PipelineMode::kM1;
  if (name == "M2" || name == "m2") return PipelineMode::kM2;
  if (name == "M3" || name == "m3") return PipelineMode::kM3;
  if (name == "M4" || name == "m4") return PipelineMode::kM4;
  throw Error(ErrorKind::kConfig, "unknown mode '" + std::string(name) + "' (expected M1-M4)");
}

PipelineConfig PipelineConfig::from_json(std::string_view content) {
  json root;
  try {
    root = json::parse(content);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::kConfig, std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorKind::kConfig, "config must be a JSON object");
  reject_unknown(root,
                 {"corpus", "vectors", "positives", "stopwords", "frequencies", "labeled",
                  "work_dir", "mode", "seed", "miner", "sif", "ranker", "classifier"},
                 "");
  PipelineConfig c;
  read_key(root, "corpus", c.corpus_path);
  read_key(root, "vectors", c.vectors_path);
  read_key(root, "positives", c.positives_path);
  read_key(root, "stopwords", c.stopwords_path);
  read_key(root, "frequencies", c.frequencies_path);
  read_key(root, "labeled", c.labeled_path);
  read_key(root, "work_dir", c.work_dir);
  read_key(root, "seed", c.seed);
  if (root.contains("mode")) c.mode = parse_mode(root["mode"].get<std::string>());
  if (root.contains("miner")) {
    const json &m = root["miner"];
    reject_unknown(m,
                   {"min_support", "max_n", "num_trees", "subsample_size", "max_depth",
                    "quality_threshold", "iterations", "unigram_floor", "pos_guidance"},
                   "miner.");
    read_key(m, "min_support", c.miner.min_support);
    read_key(m, "max_n", c.miner.max_n);
    read_key(m, "num_trees", c.miner.num_trees);
    read_key(m, "subsample_size", c.miner.subsample_size);
    read_key(m, "max_depth", c.miner.max_depth);
    read_key(m, "quality_threshold", c.miner.quality_threshold);
    read_key(m, "iterations", c.miner.iterations);
    read_key(m, "unigram_floor", c.miner.unigram_floor);
    read_key(m, "pos_guidance", c.miner.pos_guidance);
  }
  if (root.contains("sif")) {
    const json &s = root["sif"];
    reject_unknown(s, {"a", "remove_common_component", "oov_policy", "frequency_mode"}, "sif.");
    read_key(s, "a", c.sif.a);
    read_key(s, "remove_common_component", c.sif.remove_common_component);
    if (s.contains("oov_policy")) {
      std::string p = s["oov_policy"].get<std::string>();
      if (p != "skip" && p != "zero") throw Error(ErrorKind::kConfig, "sif.oov_policy must be skip or zero");
      c.sif.oov_policy = p == "skip" ? OovPolicy::kSkip : OovPolicy::kZero;
    }
    if (s.contains("frequency_mode")) {
      std::string m = s["frequency_mode"].get<std::string>();
      if (m != "raw" && m != "relative") {
        throw Error(ErrorKind::kConfig, "sif.frequency_mode must be raw or relative");
      }
      c.sif.frequency_mode = m == "raw" ? FrequencyMode::kRaw : FrequencyMode::kRelative;
    }
  }
  if (root.contains("ranker")) {
    const json &r = root["ranker"];
    reject_unknown(r, {"threshold", "all_sections"}, "ranker.");
    read_key(r, "threshold", c.rank_threshold);
    read_key(r, "all_sections", c.rank_all_sections);
  }
  if (root.contains("classifier")) {
    const json &k = root["classifier"];
    reject_unknown(k, {"hidden", "epochs", "learning_rate", "batch_size", "decision_threshold"},
                   "classifier.");
    read_key(k, "hidden", c.classifier.hidden);
    read_key(k, "epochs", c.classifier.epochs);
    read_key(k, "learning_rate", c.classifier.learning_rate);
    read_key(k, "batch_size", c.classifier.batch_size);
    read_key(k, "decision_threshold", c.decision_threshold);
  }
  c.apply_seed();
  return c;
}

std::string PipelineConfig::to_json() const {
  json root;
  root["corpus"] = corpus_path;
  root["vectors"] = vectors_path;
  root["positives"] = positives_path;
  root["stopwords"] = stopwords_path;
  root["frequencies"] = frequencies_path;
  root["labeled"] = labeled_path;
  root["work_dir"] = work_dir;
  root["mode"] = mode_name(mode);
  root["seed"] = seed;
  root["miner"] = {{"min_support", miner.min_support},
                   {"max_n", miner.max_n},
                   {"num_trees", miner.num_trees},
                   {"subsample_size", miner.subsample_size},
                   {"max_depth", miner.max_depth},
                   {"quality_threshold", miner.quality_threshold},
                   {"iterations", miner.iterations},
                   {"unigram_floor", miner.unigram_floor},
                   {"pos_guidance", miner.pos_guidance}};
  root["sif"] = {{"a", sif.a},
                 {"remove_common_component", sif.remove_common_component},
                 {"oov_policy", oov_name(sif.oov_policy)},
                 {"frequency_mode", frequency_mode_name(sif.frequency_mode)}};
  root["ranker"] = {{"threshold", rank_threshold}, {"all_sections", rank_all_sections}};
  root["classifier"] = {{"hidden", classifier.hidden},
                        {"epochs", classifier.epochs},
                        {"learning_rate", classifier.learning_rate},
                        {"batch_size", classifier.batch_size},
                        {"decision_threshold", decision_threshold}};
  return root.dump(2) + "\n";
}

std::string PipelineConfig::hash() const {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(fingerprint(to_json())));
  return buffer;
}

void PipelineConfig::apply_seed() {
  miner.seed = derive_seed(seed, "phrase_miner");
  classifier.seed = derive_seed(seed, "skill_classifier");
}

void PipelineConfig::validate() const {
  miner.validate();
  sif.validate();
  classifier.validate();
}

std::vector<Extraction> extract_skills_serial(const std::vector<Document> &docs,
                                              const ExtractionContext &context,
                                              PipelineMode mode,
                                              const PipelineConfig &config) {
  check_context(context, mode);
  ExtractionTables tables = quality_tables(context);
  SegmentScorer scorer(*context.stats, std::move(tables.multiword), config.miner.max_n,
                       config.miner.unigram_floor, context.pos_guide);
  std::vector<Extraction> out;
  for (const Document &doc : docs) {
    for (Extraction &e : extract_document(doc, scorer, tables.unigram, context, mode, config)) {
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<Extraction> extract_skills(const std::vector<Document> &docs,
                                       const ExtractionContext &context, PipelineMode mode,
                                       const PipelineConfig &config) {
  check_context(context, mode);
  ExtractionTables tables = quality_tables(context);
  SegmentScorer scorer(*context.stats, std::move(tables.multiword), config.miner.max_n,
                       config.miner.unigram_floor, context.pos_guide);
  std::vector<std::vector<Extraction>> per_doc(docs.size());
  const long n = static_cast<long>(docs.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i) {
    per_doc[i] = extract_document(docs[i], scorer, tables.unigram, context, mode, config);
  }
  std::vector<Extraction> out;
  for (auto &items : per_doc) {
    for (Extraction &e : items) out.push_back(std::move(e));
  }
  return out;
}

std::string format_extractions(const std::vector<Extraction> &extractions) {
  std::string out = "doc_id\tsection_index\tphrase\tquality\trank_score\tskill_probability\n";
  for (const Extraction &e : extractions) {
    out += e.doc_id + "\t" + std::to_string(e.section_index) + "\t" + e.phrase + "\t" +
           format_double(e.quality) + "\t" + format_optional(e.rank_score) + "\t" +
           format_optional(e.skill_probability) + "\n";
  }
  return out;
}

std::vector<LabeledTerm> build_training_set(
    const std::vector<std::pair<std::string, int>> &labeled,
    const std::vector<MinedPhrase> &negative_pool, const TextEmbedder &embedder,
    uint64_t seed, std::vector<std::string> *warnings) {
  std::vector<std::pair<std::string, int>> terms = labeled;
  std::vector<std::string> positives;
  size_t negatives = 0;
  for (const auto &[phrase, label] : labeled) {
    if (label) {
      positives.push_back(phrase);
    } else {
      ++negatives;
    }
  }
  if (negatives < positives.size()) {
    std::vector<std::string> pool;
    for (const MinedPhrase &p : negative_pool) pool.push_back(p.phrase);
    std::vector<std::string> known = positives;
    for (const auto &[phrase, label] : labeled) known.push_back(phrase);
    for (std::string &phrase :
         sample_negatives(known, pool, positives.size() - negatives, seed)) {
      terms.emplace_back(std::move(phrase), 0);
    }
  }
  std::vector<LabeledTerm> out;
  for (auto &[phrase, label] : terms) {
    std::optional<Embedding> e = embedder.try_embed(text::split_whitespace(phrase));
    if (!e) {
      if (warnings) warnings->push_back("no vector for any word of '" + phrase + "', skipped");
      continue;
    }
    out.push_back({phrase, label, normalized(std::move(*e))});
  }
  return out;
}

PipelineOutput run_pipeline(PipelineInputs &inputs, const PipelineConfig &config) {
  config.validate();
  PipelineOutput out;
  out.mining = mine_phrases(inputs.docs, inputs.positives, inputs.stopwords, config.miner);

  std::optional<SifEmbedder> embedder;
  if (uses_ranking(config.mode) || uses_classifier(config.mode)) {
    if (!inputs.vectors) {
      throw Error(ErrorKind::kState, std::string("mode ") + mode_name(config.mode) +
                                         " needs word vectors");
    }
    if (inputs.vectors->total_frequency() == 0) {
      inputs.vectors->set_frequencies(out.mining.stats);
    }
    embedder.emplace(*inputs.vectors, config.sif);
    if (config.sif.remove_common_component) {
      std::vector<std::vector<std::string>> sentences;
      for (const TokenizedSentence *s : all_sentences(inputs.docs)) sentences.push_back(s->keys());
      embedder->fit_common_component(sentences);
    }
  }
  if (uses_classifier(config.mode)) {
    if (inputs.labeled.empty()) {
      throw Error(ErrorKind::kState, "no labeled terms; the classifier cannot be trained");
    }
    std::vector<LabeledTerm> data =
        build_training_set(inputs.labeled, out.mining.phrases, *embedder,
                           derive_seed(config.seed, "negatives"));
    out.classifier = train_classifier(data, config.classifier).model;
  }
  PosGuide guide;
  if (config.miner.pos_guidance) {
    guide = build_pos_guide(inputs.docs, inputs.positives, config.miner.max_n);
  }
  ExtractionContext context;
  context.pos_guide = config.miner.pos_guidance ? &guide : nullptr;
  context.stats = &out.mining.stats;
  context.model = &out.mining.model;
  context.rows = &out.mining.rows;
  context.embedder = embedder ? &*embedder : nullptr;
  context.classifier = out.classifier ? &*out.classifier : nullptr;
  out.extractions = extract_skills(inputs.docs, context, config.mode, config);
  return out;
}

std::string make_manifest(const PipelineConfig &config, std::string_view stage,
                          const std::vector<std::string> &artifacts) {
  json root;
  root["format_version"] = 1;
  root["kind"] = "manifest";
  root["stage"] = stage;
  root["mode"] = mode_name(config.mode);
  root["seed"] = config.seed;
  root["config_hash"] = config.hash();
  root["config"] = json::parse(config.to_json());
  root["artifacts"] = artifacts;
  root["artifact_versions"] = {{"corpus_stats", kStatsFormatVersion},
                               {"quality_model", kQualityModelFormatVersion},
                               {"skill_classifier", kClassifierFormatVersion}};
  return root.dump(2) + "\n";
}

}  // namespace skillminer
