#include "skillminer/corpus.h"

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "skillminer/text.h"
#include "testing/synthetic.h"

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

std::vector<std::string> surfaces(const TokenizedSentence &s) {
  std::vector<std::string> out;
  for (const Token &t : s.tokens) out.push_back(t.surface);
  return out;
}

TEST(LoadCorpus, SingleRecord) {
  auto docs = parse_corpus(
      R"({"id":"j1","sections":[{"kind":"requirements","text":"biết Java"}]})");
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].id, "j1");
  ASSERT_EQ(docs[0].sections.size(), 1u);
  EXPECT_EQ(docs[0].sections[0].kind, SectionKind::kRequirements);
  EXPECT_EQ(docs[0].sections[0].text, "biết Java");
}

TEST(LoadCorpus, EmptyFileAndUnknownKind) {
  EXPECT_TRUE(parse_corpus("").empty());
  EXPECT_TRUE(parse_corpus("\n\n").empty());
  auto docs = parse_corpus(R"({"id":"j","sections":[{"kind":"benefits","text":"x"}]})");
  EXPECT_EQ(docs[0].sections[0].kind, SectionKind::kOther);
}

TEST(LoadCorpus, RejectsBadRecords) {
  auto kind_of = [](const std::string &content) {
    try {
      parse_corpus(content);
    } catch (const Error &e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(kind_of("{not json").find("line 1"), std::string::npos);
  EXPECT_NE(kind_of(R"({"id":"","sections":[{"kind":"title","text":"x"}]})").find("empty id"),
            std::string::npos);
  EXPECT_NE(kind_of(R"({"id":"a","sections":[]})").find("no sections"), std::string::npos);
  std::string dup = R"({"id":"a","sections":[{"kind":"title","text":"x"}]})";
  EXPECT_NE(kind_of(dup + "\n" + dup).find("line 2"), std::string::npos);
}

TEST(LoadCorpus, PosTagsMustMatchTokens) {
  auto docs = parse_corpus(
      R"({"id":"a","sections":[{"kind":"requirements","text":"biết Java","pos":["V","Np"]}]})");
  tokenize(docs, DefaultTokenizer());
  EXPECT_EQ(docs[0].sections[0].sentences[0].tokens[1].pos_tag, "Np");
  auto bad = parse_corpus(
      R"({"id":"a","sections":[{"kind":"requirements","text":"biết Java","pos":["V"]}]})");
  EXPECT_THROW(tokenize(bad, DefaultTokenizer()), Error);
}

TEST(Tokenize, SentencesAndTokens) {
  DefaultTokenizer tok;
  auto s = tok.split("Biết Java. Có kinh nghiệm SQL");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].tokens.size(), 2u);
  EXPECT_EQ(s[1].tokens.size(), 4u);
  EXPECT_EQ(s[1].keys(), (std::vector<std::string>{"có", "kinh", "nghiệm", "sql"}));

  s = tok.split("lập_trình viên");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(surfaces(s[0]), (std::vector<std::string>{"lập_trình", "viên"}));
  EXPECT_TRUE(tok.split("").empty());
  EXPECT_TRUE(tok.split(" . , ").empty());
}

TEST(Tokenize, DecimalPointDoesNotEndSentence) {
  auto s = DefaultTokenizer().split("Node.js 3.5 years\nPython!");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(surfaces(s[0]), (std::vector<std::string>{"Node.js", "3.5", "years"}));
}

TEST(Tokenize, QuotesAndBrackets) {
  auto s = DefaultTokenizer().split("know \"unit testing\" well (with Git, CI)");
  ASSERT_EQ(s.size(), 1u);
  const auto &t = s[0].tokens;
  ASSERT_EQ(t.size(), 7u);
  EXPECT_EQ(t[1].surface, "unit");
  EXPECT_TRUE(t[1].quoted);
  EXPECT_TRUE(t[2].quoted);
  EXPECT_FALSE(t[3].quoted);
  EXPECT_EQ(t[4].surface, "with");
  EXPECT_TRUE(t[4].bracketed);
  EXPECT_EQ(t[5].surface, "Git");
  EXPECT_TRUE(t[6].bracketed);
  EXPECT_EQ(t[6].surface, "CI");
}

TEST(Tokenize, SurfacesReconstructNormalizedText) {
  std::string input = "Kỹ năng  giao tiếp\ttốt và  làm việc nhóm";
  auto s = DefaultTokenizer().split(input);
  std::vector<std::string> all;
  for (const auto &sentence : s) {
    for (const Token &t : sentence.tokens) {
      EXPECT_FALSE(t.surface.empty());
      EXPECT_EQ(t.surface.find_first_of(" \t\n"), std::string::npos);
      all.push_back(t.surface);
    }
  }
  EXPECT_EQ(all, text::split_whitespace(input));
}

TEST(CountNgrams, SmallExamples) {
  auto docs = docs_from({"a b a"});
  CorpusStats stats = count_ngrams(docs, 2);
  EXPECT_EQ(stats.count("a"), 2u);
  EXPECT_EQ(stats.count("b"), 1u);
  EXPECT_EQ(stats.count("a b"), 1u);
  EXPECT_EQ(stats.count("b a"), 1u);
  EXPECT_EQ(stats.count("a b a"), 0u);
  EXPECT_EQ(stats.total_token_occurrences(), 3u);
  EXPECT_EQ(stats.doc_frequency("a"), 1u);
  EXPECT_EQ(stats.num_docs(), 1u);

  CorpusStats two = count_ngrams(docs_from({"a", "a c"}), 2);
  EXPECT_EQ(two.doc_frequency("a"), 2u);
  EXPECT_EQ(two.count("a"), 2u);
}

TEST(CountNgrams, NeverCrossSentences) {
  CorpusStats stats = count_ngrams(docs_from({"a b. c d"}), 3);
  EXPECT_EQ(stats.count("b c"), 0u);
  EXPECT_EQ(stats.count("c d"), 1u);
}

TEST(CountNgrams, CaseFoldedKeys) {
  CorpusStats stats = count_ngrams(docs_from({"Java java JAVA"}), 1);
  EXPECT_EQ(stats.count("java"), 3u);
}

TEST(Popularity, Examples) {
  CorpusStats stats = count_ngrams(docs_from({"a b a"}), 2);
  EXPECT_DOUBLE_EQ(popularity(stats, "a"), 2.0 / 3.0);
  EXPECT_EQ(popularity(stats, "zzz"), 0.0);
  EXPECT_EQ(popularity(stats, "a b"), 0.5);
  CorpusStats single = count_ngrams(docs_from({"x x x"}), 1);
  EXPECT_EQ(popularity(single, "x"), 1.0);
}

class CorpusProperties : public ::testing::Test {
 protected:
  void SetUp() override {
    docs_ = testing::make_small_corpus(80, 21);
    tokenize(docs_, DefaultTokenizer());
  }
  std::vector<Document> docs_;
};

TEST_F(CorpusProperties, PopularitySumsToOnePerOrder) {
  CorpusStats stats = count_ngrams(docs_, 4);
  std::vector<double> total(5, 0.0);
  for (const auto &[key, c] : stats.ngram_counts()) {
    total[ngram_length(key)] += popularity(stats, key);
  }
  for (size_t n = 1; n <= 4; ++n) EXPECT_NEAR(total[n], 1.0, 1e-12) << n;
}

TEST_F(CorpusProperties, StoredInvariants) {
  CorpusStats stats = count_ngrams(docs_, 3);
  uint64_t unigram_total = 0;
  for (const auto &[key, c] : stats.ngram_counts()) {
    EXPECT_GE(c, 1u);
    EXPECT_LE(stats.doc_frequency(key), stats.num_docs());
    if (ngram_length(key) == 1) unigram_total += c;
  }
  EXPECT_EQ(unigram_total, stats.total_token_occurrences());
}

TEST_F(CorpusProperties, OrderInsensitive) {
  CorpusStats a = count_ngrams(docs_, 3);
  std::vector<Document> shuffled = docs_;
  std::mt19937 rng(4);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  EXPECT_TRUE(a == count_ngrams(shuffled, 3));
}

TEST_F(CorpusProperties, MergeEqualsConcatenation) {
  std::vector<Document> first(docs_.begin(), docs_.begin() + 30);
  std::vector<Document> second(docs_.begin() + 30, docs_.end());
  CorpusStats merged = count_ngrams_serial(first, 3);
  merged.merge(count_ngrams_serial(second, 3));
  EXPECT_TRUE(merged == count_ngrams_serial(docs_, 3));
  EXPECT_THROW(merged.merge(CorpusStats(2)), Error);
}

TEST_F(CorpusProperties, StatsArtifactRoundTrip) {
  CorpusStats stats = count_ngrams(docs_, 3);
  std::string json = stats_to_json(stats);
  CorpusStats back = stats_from_json(json);
  EXPECT_TRUE(back == stats);
  EXPECT_EQ(stats_to_json(back), json);
  EXPECT_THROW(stats_from_json(R"({"kind":"corpus_stats","format_version":99})"), Error);
}

TEST(CorpusFormat, RoundTrip) {
  std::string line =
      R"({"id":"j1","sections":[{"kind":"requirements","text":"Kỹ năng \"SQL\"","pos":["N","N","Np"]},{"kind":"title","text":"Dev"}]})";
  auto docs = parse_corpus(line + "\n");
  std::string formatted = format_corpus(docs);
  EXPECT_EQ(format_corpus(parse_corpus(formatted)), formatted);
  EXPECT_EQ(parse_corpus(formatted)[0].sections[0].pos_tags.size(), 3u);
}

}  // namespace
}  // namespace skillminer
