// Times each OpenMP kernel against its serial reference on a planted corpus
// and checks that both produce the same result.
//
//   skillminer_bench [num_docs] [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "skillminer/common.h"
#include "skillminer/pipeline.h"
#include "skillminer/quality_model.h"
#include "testing/synthetic.h"

using namespace skillminer;

namespace {

double best_of(int repeats, const std::function<void()> &fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    auto start = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

bool all_equal = true;

void report(const char *name, double serial, double parallel, bool same) {
  all_equal = all_equal && same;
  std::printf("%-18s %10.4f %10.4f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
              same ? "same" : "DIFFERENT");
}

}  // namespace

int main(int argc, char **argv) {
  testing::PlantedCorpusOptions options;
  if (argc > 1) options.num_docs = std::strtoul(argv[1], nullptr, 10);
  int repeats = argc > 2 ? std::atoi(argv[2]) : 3;

  testing::PlantedCorpus corpus = testing::make_planted_corpus(options);
  tokenize(corpus.docs, DefaultTokenizer());
  PipelineConfig config;
  config.apply_seed();
  MiningResult mining = mine_phrases(corpus.docs, corpus.positives, corpus.stopwords, config.miner);

  std::printf("%zu documents, %d threads, best of %d\n", corpus.docs.size(),
              omp_get_max_threads(), repeats);
  std::printf("%-18s %10s %10s %9s\n", "kernel", "serial s", "parallel s", "speedup");

  {
    CorpusStats a, b;
    double s = best_of(repeats, [&] { a = count_ngrams_serial(corpus.docs, config.miner.max_n); });
    double p = best_of(repeats, [&] { b = count_ngrams(corpus.docs, config.miner.max_n); });
    report("count_ngrams", s, p, a == b);
  }
  {
    auto candidates = extract_candidates(mining.stats, config.miner.min_support, config.miner.max_n);
    ContextTable a, b;
    double s = best_of(repeats, [&] {
      a = collect_contexts_serial(corpus.docs, candidates, config.miner.max_n);
    });
    double p = best_of(repeats, [&] { b = collect_contexts(corpus.docs, candidates, config.miner.max_n); });
    report("collect_contexts", s, p, a == b);
  }
  {
    std::vector<FeatureVector> rows;
    std::vector<int> labels;
    for (const auto &row : mining.rows) {
      rows.push_back(row.features.values());
      labels.push_back(corpus.positives.count(row.candidate.phrase) ? 1 : 0);
    }
    EnsembleConfig ensemble = config.miner.ensemble(0);
    QualityModel a, b;
    double s = best_of(repeats, [&] { a = train_ensemble_serial(rows, labels, ensemble); });
    double p = best_of(repeats, [&] { b = train_ensemble(rows, labels, ensemble); });
    report("train_ensemble", s, p, quality_model_to_json(a) == quality_model_to_json(b));
  }
  {
    SegmentScorer scorer(mining.stats, SegmentScorer::quality_table(mining.model, mining.rows),
                         config.miner.max_n);
    auto sentences = all_sentences(corpus.docs);
    std::vector<SegmentationResult> a, b;
    double s = best_of(repeats, [&] { a = segment_sentences_serial(scorer, sentences); });
    double p = best_of(repeats, [&] { b = segment_sentences(scorer, sentences); });
    bool same = a.size() == b.size();
    for (size_t i = 0; same && i < a.size(); ++i) same = a[i].segments == b[i].segments;
    report("segment_sentences", s, p, same);
  }
  {
    VectorStore store = corpus.vectors;
    store.set_frequencies(mining.stats);
    SifEmbedder embedder(store, config.sif);
    auto data = build_training_set(corpus.labeled, mining.phrases, embedder,
                                   derive_seed(config.seed, "negatives"));
    SkillClassifier classifier = train_classifier(data, config.classifier).model;
    ExtractionContext context{&mining.stats, &mining.model, &mining.rows, &embedder, &classifier};
    std::vector<Extraction> a, b;
    double s = best_of(repeats, [&] {
      a = extract_skills_serial(corpus.docs, context, PipelineMode::kM4, config);
    });
    double p = best_of(repeats, [&] { b = extract_skills(corpus.docs, context, PipelineMode::kM4, config); });
    report("extract_skills M4", s, p, format_extractions(a) == format_extractions(b));
  }
  return all_equal ? 0 : 1;
}
