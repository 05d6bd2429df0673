#include "skillminer/segmentation.h"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "skillminer/common.h"

namespace skillminer {
namespace {

std::vector<Document> docs_from(const std::vector<std::string> &texts) {
  std::vector<Document> docs;
  for (size_t i = 0; i < texts.size(); ++i) {
    Document doc;
    doc.id = "d" + std::to_string(i);
    doc.sections.push_back({SectionKind::kRequirements, texts[i], {}, {}});
    docs.push_back(std::move(doc));
  }
  tokenize(docs, DefaultTokenizer());
  return docs;
}

double brute_force(const SegmentScorer &scorer, const TokenizedSentence &sentence) {
  std::vector<std::string> keys = sentence.keys();
  const size_t n = keys.size();
  double best = -std::numeric_limits<double>::infinity();
  for (uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
    double total = 0;
    size_t begin = 0;
    for (size_t cut = 1; cut <= n; ++cut) {
      if (cut == n || (mask >> (cut - 1) & 1u)) {
        total += scorer.log_score(sentence, keys, begin, cut);
        begin = cut;
      }
    }
    best = std::max(best, total);
  }
  return best;
}

void expect_partition(const SegmentationResult &r, size_t n) {
  size_t at = 0;
  for (auto [b, e] : r.segments) {
    EXPECT_EQ(b, at);
    EXPECT_LT(b, e);
    at = e;
  }
  EXPECT_EQ(at, n);
}

TEST(Segment, SingleTokenAndEmpty) {
  auto docs = docs_from({"java"});
  CorpusStats stats = count_ngrams(docs, 3);
  SegmentScorer scorer(stats, {}, 3);
  const auto &sentence = docs[0].sections[0].sentences[0];
  SegmentationResult r = segment_sentence(scorer, sentence);
  ASSERT_EQ(r.segments.size(), 1u);
  EXPECT_EQ(r.segments[0], std::make_pair(size_t{0}, size_t{1}));
  EXPECT_TRUE(segment_sentence(scorer, TokenizedSentence{}).segments.empty());
}

TEST(Segment, PrefersHighQualityPhrase) {
  std::vector<std::string> texts;
  for (int i = 0; i < 20; ++i) texts.push_back("biết data mining");
  for (int i = 0; i < 20; ++i) texts.push_back("data mining tốt");
  for (int i = 0; i < 20; ++i) texts.push_back("biết python");
  auto docs = docs_from(texts);
  CorpusStats stats = count_ngrams(docs, 3);
  SegmentScorer scorer(stats,
                       {{"data mining", 0.99},
                        {"biết data", 0.01},
                        {"biết data mining", 0.01},
                        {"mining tốt", 0.01}},
                       3);
  const auto &sentence = docs[0].sections[0].sentences[0];
  SegmentationResult r = segment_sentence(scorer, sentence);
  EXPECT_EQ(r.phrases(sentence), (std::vector<std::string>{"biết", "data mining"}));
  EXPECT_EQ(r.score, brute_force(scorer, sentence));
}

TEST(Segment, ZeroQualityIsIllegal) {
  auto docs = docs_from({"a b", "a b"});
  CorpusStats stats = count_ngrams(docs, 2);
  const auto &sentence = docs[0].sections[0].sentences[0];
  std::vector<std::string> keys = sentence.keys();
  SegmentScorer zero(stats, {{"a b", 0.0}}, 2);
  EXPECT_EQ(zero.log_score(sentence, keys, 0, 2), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(segment_sentence(zero, sentence).segments.size(), 2u);
  SegmentScorer short_n(stats, {{"a b", 1.0}}, 1);
  EXPECT_EQ(short_n.log_score(sentence, keys, 0, 2), -std::numeric_limits<double>::infinity());
}

TEST(Segment, UnseenTokenCountsOnce) {
  auto docs = docs_from({"a b c"});
  CorpusStats stats = count_ngrams(docs, 2);
  auto other = docs_from({"zzz"});
  const auto &sentence = other[0].sections[0].sentences[0];
  SegmentScorer scorer(stats, {}, 2, 2.0);
  EXPECT_DOUBLE_EQ(scorer.log_score(sentence, sentence.keys(), 0, 1), std::log(2.0 / 3.0));
}

TEST(Segment, MatchesExhaustiveSearch) {
  Rng rng(derive_seed(99, "segmentation_test"));
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  std::uniform_int_distribution<size_t> word(0, vocab.size() - 1);
  std::uniform_int_distribution<int> length(1, 8);
  std::uniform_real_distribution<double> unit(0, 1);
  std::vector<std::string> texts;
  for (int i = 0; i < 150; ++i) {
    std::string t;
    for (int k = 0, n = length(rng); k < n; ++k) t += (k ? " " : "") + vocab[word(rng)];
    texts.push_back(t);
  }
  auto docs = docs_from(texts);
  CorpusStats stats = count_ngrams(docs, 4);
  std::unordered_map<std::string, double> quality;
  for (const auto &[key, c] : stats.ngram_counts()) {
    if (ngram_length(key) > 1 && unit(rng) < 0.7) quality[key] = unit(rng);
  }
  SegmentScorer scorer(stats, quality, 4, 0.7);
  for (const auto &doc : docs) {
    const auto &sentence = doc.sections[0].sentences[0];
    SegmentationResult r = segment_sentence(scorer, sentence);
    EXPECT_EQ(r.score, brute_force(scorer, sentence)) << doc.sections[0].text;
    expect_partition(r, sentence.tokens.size());
  }
}

TEST(PosGuide, WeightsMultiwordSegments) {
  auto docs = parse_corpus(
      R"({"id":"a","sections":[{"kind":"requirements","text":"biết data mining","pos":["V","N","N"]}]})"
      "\n"
      R"({"id":"b","sections":[{"kind":"requirements","text":"data mining tốt","pos":["N","N","A"]}]})");
  tokenize(docs, DefaultTokenizer());
  PosGuide guide = build_pos_guide(docs, {"data mining", "mining tốt"}, 3);
  EXPECT_EQ(guide.probability("N N"), 2.0 / 3.0);
  EXPECT_EQ(guide.probability("N A"), 1.0 / 3.0);
  EXPECT_EQ(guide.probability("V N"), 0.0);

  CorpusStats stats = count_ngrams(docs, 3);
  std::unordered_map<std::string, double> q = {{"biết data", 1.0}, {"data mining", 1.0}};
  SegmentScorer plain(stats, q, 3);
  SegmentScorer guided(stats, q, 3, 1.0, &guide);
  const auto &sentence = docs[0].sections[0].sentences[0];
  auto keys = sentence.keys();
  EXPECT_EQ(guided.log_score(sentence, keys, 0, 2), -std::numeric_limits<double>::infinity());
  EXPECT_NEAR(guided.log_score(sentence, keys, 1, 3),
              plain.log_score(sentence, keys, 1, 3) + std::log(2.0 / 3.0), 1e-12);
}

}  // namespace
}  // namespace skillminer
