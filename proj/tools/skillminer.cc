// Command-line driver: mine, train-classifier, extract, evaluate, embed-text.
//
// Every stage reads its inputs from the config file (overridable by flags)
// and the artifacts earlier stages left in the work directory.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skillminer/common.h"
#include "skillminer/corpus.h"
#include "skillminer/embedding.h"
#include "skillminer/evaluator.h"
#include "skillminer/phrase_miner.h"
#include "skillminer/pipeline.h"
#include "skillminer/skill_classifier.h"

namespace fs = std::filesystem;
using namespace skillminer;

namespace {

// Flag values; unset optionals leave the config file value alone.
struct Overrides {
  std::string config_path;
  std::optional<std::string> corpus, vectors, positives, stopwords, frequencies,
      labeled, work_dir, mode;
  std::optional<uint64_t> seed;
  std::optional<uint64_t> min_support;
  std::optional<int> max_n, num_trees, max_depth, iterations, hidden, epochs;
  std::optional<double> quality_threshold, sif_a, rank_threshold, learning_rate,
      decision_threshold;
};

PipelineConfig load_config(const Overrides &o) {
  PipelineConfig c;
  if (!o.config_path.empty()) c = PipelineConfig::from_json(read_file(o.config_path));
  if (o.corpus) c.corpus_path = *o.corpus;
  if (o.vectors) c.vectors_path = *o.vectors;
  if (o.positives) c.positives_path = *o.positives;
  if (o.stopwords) c.stopwords_path = *o.stopwords;
  if (o.frequencies) c.frequencies_path = *o.frequencies;
  if (o.labeled) c.labeled_path = *o.labeled;
  if (o.work_dir) c.work_dir = *o.work_dir;
  if (o.mode) c.mode = parse_mode(*o.mode);
  if (o.seed) c.seed = *o.seed;
  if (o.min_support) c.miner.min_support = *o.min_support;
  if (o.max_n) c.miner.max_n = *o.max_n;
  if (o.num_trees) c.miner.num_trees = *o.num_trees;
  if (o.max_depth) c.miner.max_depth = *o.max_depth;
  if (o.iterations) c.miner.iterations = *o.iterations;
  if (o.quality_threshold) c.miner.quality_threshold = *o.quality_threshold;
  if (o.sif_a) c.sif.a = *o.sif_a;
  if (o.rank_threshold) c.rank_threshold = *o.rank_threshold;
  if (o.hidden) c.classifier.hidden = *o.hidden;
  if (o.epochs) c.classifier.epochs = *o.epochs;
  if (o.learning_rate) c.classifier.learning_rate = *o.learning_rate;
  if (o.decision_threshold) c.decision_threshold = *o.decision_threshold;
  c.apply_seed();
  c.validate();
  if (auto warning = c.sif.validate()) std::cerr << "warning: " << *warning << "\n";
  return c;
}

void require_path(const std::string &path, const char *what) {
  if (path.empty()) throw Error(ErrorKind::kConfig, std::string("no ") + what + " path configured");
  if (!fs::exists(path)) throw Error(ErrorKind::kInput, std::string(what) + " not found: " + path);
}

std::string artifact(const PipelineConfig &c, const char *name) {
  return (fs::path(c.work_dir) / name).string();
}

void require_artifact(const PipelineConfig &c, const char *name, const char *step) {
  if (!fs::exists(artifact(c, name))) {
    throw Error(ErrorKind::kState, std::string("missing ") + artifact(c, name) + "; run " +
                                       step + " first");
  }
}

std::vector<Document> load_tokenized_corpus(const PipelineConfig &c) {
  require_path(c.corpus_path, "corpus");
  std::vector<Document> docs = load_corpus(c.corpus_path);
  tokenize(docs, DefaultTokenizer());
  return docs;
}

WordSet load_positives(const PipelineConfig &c) {
  require_path(c.positives_path, "positive list");
  return load_phrase_list(c.positives_path);
}

WordSet load_stopwords(const PipelineConfig &c) {
  if (c.stopwords_path.empty()) return {};
  require_path(c.stopwords_path, "stopword list");
  return load_phrase_list(c.stopwords_path);
}

VectorStore load_store(const PipelineConfig &c, const CorpusStats &stats) {
  require_path(c.vectors_path, "word vectors");
  std::vector<std::string> warnings;
  VectorStore store = load_vectors(c.vectors_path, &warnings);
  for (const std::string &w : warnings) std::cerr << "warning: " << w << "\n";
  if (!c.frequencies_path.empty()) {
    require_path(c.frequencies_path, "word frequencies");
    parse_frequencies(read_file(c.frequencies_path), store);
  } else {
    store.set_frequencies(stats);
  }
  return store;
}

void write_artifact(const PipelineConfig &c, const char *name, const std::string &content) {
  write_file(artifact(c, name), content);
  std::cerr << "wrote " << artifact(c, name) << "\n";
}

void run_mine(const PipelineConfig &c) {
  std::vector<Document> docs = load_tokenized_corpus(c);
  WordSet positives = load_positives(c);
  WordSet stopwords = load_stopwords(c);
  MiningResult result = mine_phrases(docs, positives, stopwords, c.miner);
  fs::create_directories(c.work_dir);
  write_artifact(c, "stats.json", stats_to_json(result.stats));
  write_artifact(c, "quality_model.json", quality_model_to_json(result.model));
  write_artifact(c, "candidates.tsv", format_candidate_rows(result.rows));
  write_artifact(c, "phrases.tsv", format_mined_phrases(result.phrases));
  write_artifact(c, "manifest_mine.json",
                 make_manifest(c, "mine",
                               {"stats.json", "quality_model.json", "candidates.tsv",
                                "phrases.tsv"}));
  std::cerr << result.phrases.size() << " phrases at quality >= "
            << format_double(c.miner.quality_threshold) << "\n";
}

void run_train_classifier(const PipelineConfig &c) {
  require_artifact(c, "stats.json", "mine");
  require_artifact(c, "phrases.tsv", "mine");
  require_path(c.labeled_path, "labeled terms");
  CorpusStats stats = stats_from_json(read_file(artifact(c, "stats.json")));
  VectorStore store = load_store(c, stats);
  SifEmbedder embedder(store, c.sif);
  std::vector<std::string> warnings;
  std::vector<LabeledTerm> data = build_training_set(
      parse_labeled_terms(read_file(c.labeled_path)),
      parse_mined_phrases(read_file(artifact(c, "phrases.tsv"))), embedder,
      derive_seed(c.seed, "negatives"), &warnings);
  for (const std::string &w : warnings) std::cerr << "warning: " << w << "\n";
  TrainingResult result = train_classifier(data, c.classifier);
  write_artifact(c, "classifier.json", classifier_to_json(result.model, c.classifier.seed));
  write_artifact(c, "manifest_train.json", make_manifest(c, "train-classifier", {"classifier.json"}));
  std::cerr << data.size() << " training terms, final loss "
            << format_double(result.loss_trace.empty() ? 0.0 : result.loss_trace.back()) << "\n";
}

void run_extract(const PipelineConfig &c, const std::string &out_path) {
  require_artifact(c, "stats.json", "mine");
  require_artifact(c, "quality_model.json", "mine");
  require_artifact(c, "candidates.tsv", "mine");
  if (uses_classifier(c.mode)) require_artifact(c, "classifier.json", "train-classifier");

  std::vector<Document> docs = load_tokenized_corpus(c);
  CorpusStats stats = stats_from_json(read_file(artifact(c, "stats.json")));
  QualityModel model = quality_model_from_json(read_file(artifact(c, "quality_model.json")));
  std::vector<CandidateRow> rows = parse_candidate_rows(read_file(artifact(c, "candidates.tsv")));

  ExtractionContext context;
  context.stats = &stats;
  context.model = &model;
  context.rows = &rows;

  PosGuide guide;
  if (c.miner.pos_guidance) {
    guide = build_pos_guide(docs, load_positives(c), c.miner.max_n);
    context.pos_guide = &guide;
  }
  std::optional<VectorStore> store;
  std::optional<SifEmbedder> embedder;
  if (uses_ranking(c.mode) || uses_classifier(c.mode)) {
    store = load_store(c, stats);
    embedder.emplace(*store, c.sif);
    if (c.sif.remove_common_component) {
      std::vector<std::vector<std::string>> sentences;
      for (const TokenizedSentence *s : all_sentences(docs)) sentences.push_back(s->keys());
      embedder->fit_common_component(sentences);
    }
    context.embedder = &*embedder;
  }
  std::optional<SkillClassifier> classifier;
  if (uses_classifier(c.mode)) {
    classifier = classifier_from_json(read_file(artifact(c, "classifier.json")));
    if (classifier->input_dim() != embedder->dimension()) {
      throw Error(ErrorKind::kState,
                  "classifier input dimension " + std::to_string(classifier->input_dim()) +
                      " does not match the vectors (" + std::to_string(embedder->dimension()) +
                      "); run train-classifier first");
    }
    context.classifier = &*classifier;
  }

  std::vector<Extraction> extractions = extract_skills(docs, context, c.mode, c);
  std::string path = out_path.empty()
                         ? artifact(c, ("extract_" + std::string(mode_name(c.mode)) + ".tsv").c_str())
                         : out_path;
  fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  write_file(path, format_extractions(extractions));
  write_file(path + ".manifest.json",
             make_manifest(c, std::string("extract ") + mode_name(c.mode),
                           {fs::path(path).filename().string()}));
  std::cerr << "wrote " << path << " (" << extractions.size() << " phrases)\n";
}

void run_evaluate(const std::string &gold_path, const std::string &predictions_path,
                  const std::string &out_path) {
  require_path(gold_path, "gold file");
  require_path(predictions_path, "predictions file");
  std::vector<GoldDocument> gold = parse_gold(read_file(gold_path));
  std::string content = read_file(predictions_path);
  std::vector<PredictionSet> predictions;
  size_t first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '{') {
    predictions = parse_predictions(content);
  } else {
    std::vector<std::string> warnings;
    predictions = predictions_from_phrase_tsv(content, gold, 2, &warnings);
    for (const std::string &w : warnings) std::cerr << "warning: " << w << "\n";
  }
  std::string report = report_to_json(evaluate(gold, predictions));
  if (out_path.empty()) {
    std::cout << report;
  } else {
    write_file(out_path, report);
  }
}

void run_embed_text(const PipelineConfig &c, const std::vector<std::string> &texts) {
  CorpusStats stats(1);
  if (fs::exists(artifact(c, "stats.json"))) {
    stats = stats_from_json(read_file(artifact(c, "stats.json")));
  } else if (c.frequencies_path.empty()) {
    throw Error(ErrorKind::kState,
                "no word frequencies; configure a frequency file or run mine first");
  }
  VectorStore store = load_store(c, stats);
  SifEmbedder embedder(store, c.sif);
  DefaultTokenizer tokenizer;
  std::vector<std::string> lines = texts;
  if (lines.empty()) {
    std::string line;
    while (std::getline(std::cin, line)) lines.push_back(line);
  }
  for (const std::string &line : lines) {
    std::vector<std::string> keys;
    for (const TokenizedSentence &s : tokenizer.split(line)) {
      for (const std::string &k : s.keys()) keys.push_back(k);
    }
    Embedding e = embedder.embed(keys);
    std::string out;
    for (size_t i = 0; i < e.values.size(); ++i) {
      if (i) out += ' ';
      out += format_double(e.values[i]);
    }
    std::cout << out << "\n";
  }
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInput: return 3;
    case ErrorKind::kConfig: return 4;
    case ErrorKind::kState: return 5;
    case ErrorKind::kData: return 6;
  }
  return 1;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Occupational skill detection from job postings"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("-c,--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--corpus", o.corpus, "corpus JSONL");
  app.add_option("--vectors", o.vectors, "word2vec text vectors");
  app.add_option("--positives", o.positives, "positive phrase list");
  app.add_option("--stopwords", o.stopwords, "stopword list");
  app.add_option("--frequencies", o.frequencies, "word<TAB>count frequency file");
  app.add_option("--labeled", o.labeled, "phrase<TAB>0|1 labeled terms");
  app.add_option("--work-dir", o.work_dir, "artifact directory");
  app.add_option("--seed", o.seed, "top-level seed");
  app.add_option("--min-support", o.min_support);
  app.add_option("--max-n", o.max_n);
  app.add_option("--trees", o.num_trees);
  app.add_option("--max-depth", o.max_depth);
  app.add_option("--iterations", o.iterations);
  app.add_option("--quality-threshold", o.quality_threshold);
  app.add_option("--sif-a", o.sif_a);
  app.add_option("--rank-threshold", o.rank_threshold);
  app.add_option("--hidden", o.hidden);
  app.add_option("--epochs", o.epochs);
  app.add_option("--learning-rate", o.learning_rate);
  app.add_option("--decision-threshold", o.decision_threshold);

  CLI::App *mine = app.add_subcommand("mine", "mine quality phrases from the corpus");
  CLI::App *train = app.add_subcommand("train-classifier", "train the skill classifier");
  CLI::App *extract = app.add_subcommand("extract", "detect skills with mode M1-M4");
  std::string out_path;
  extract->add_option("--mode", o.mode, "M1, M2, M3 or M4");
  extract->add_option("-o,--out", out_path, "output TSV (default: work dir)");
  CLI::App *eval = app.add_subcommand("evaluate", "score predictions against gold spans");
  std::string gold_path, predictions_path, report_path;
  eval->add_option("--gold", gold_path, "gold JSONL")->required();
  eval->add_option("--predictions", predictions_path, "prediction JSONL or extraction TSV")
      ->required();
  eval->add_option("-o,--out", report_path, "report JSON (default: stdout)");
  CLI::App *embed = app.add_subcommand("embed-text", "print SIF embeddings of text lines");
  std::vector<std::string> texts;
  embed->add_option("text", texts, "texts to embed (default: stdin lines)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*eval) {
      run_evaluate(gold_path, predictions_path, report_path);
      return 0;
    }
    PipelineConfig config = load_config(o);
    if (*mine) run_mine(config);
    if (*train) run_train_classifier(config);
    if (*extract) run_extract(config, out_path);
    if (*embed) run_embed_text(config, texts);
  } catch (const Error &e) {
    std::cerr << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
