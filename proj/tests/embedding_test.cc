#include "skillminer/embedding.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "skillminer/common.h"

namespace skillminer {
namespace {

VectorStore small_store() {
  VectorStore store(3);
  store.set("java", {1, 0, 0});
  store.set("sql", {0, 2, 0});
  store.set("lập", {0, 0, 1});
  store.set("trình", {1, 1, 1});
  store.set("lập_trình", {3, 3, 3});
  return store;
}

std::vector<double> scaled(const std::vector<double> &v, double c) {
  std::vector<double> out = v;
  for (double &x : out) x *= c;
  return out;
}

TEST(LoadVectors, ValidFile) {
  VectorStore store = parse_vectors("2 3\nja 1 2 3\nsql 0.5 -1 2e-3\n");
  EXPECT_EQ(store.dimension(), 3);
  EXPECT_EQ(store.size(), 2u);
  EXPECT_EQ(*store.find("sql"), (std::vector<double>{0.5, -1, 2e-3}));
}

TEST(LoadVectors, ArityErrorNamesLine) {
  try {
    parse_vectors("2 3\na 1 2 3\nb 1 2\n");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInput);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_vectors("3 2\na 1 2\n"), Error);
  EXPECT_THROW(parse_vectors("1 2\na 1 nan\n"), Error);
  EXPECT_THROW(parse_vectors(""), Error);
}

TEST(LoadVectors, DuplicateWarns) {
  std::vector<std::string> warnings;
  VectorStore store = parse_vectors("2 2\na 1 2\na 3 4\n", &warnings);
  EXPECT_EQ(store.size(), 1u);
  EXPECT_EQ(*store.find("a"), (std::vector<double>{3, 4}));
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("duplicate"), std::string::npos);
}

TEST(LoadVectors, FormatRoundTrip) {
  VectorStore store = small_store();
  std::string text = format_vectors(store);
  EXPECT_EQ(format_vectors(parse_vectors(text)), text);
}

TEST(SifWeight, Examples) {
  VectorStore store = small_store();
  SifConfig config;
  EXPECT_EQ(sif_weight(store, config, "java"), 1.0);
  store.set_frequency("java", 1);
  EXPECT_NEAR(sif_weight(store, config, "java"), 9.99001e-4, 1e-9);
  double previous = 1.0;
  for (double f : {2.0, 10.0, 1e3, 1e6, 1e12}) {
    store.set_frequency("java", f);
    double w = sif_weight(store, config, "java");
    EXPECT_LT(w, previous);
    EXPECT_GT(w, 0);
    previous = w;
  }
}

TEST(SifWeight, RelativeMode) {
  VectorStore store = small_store();
  store.set_frequency("java", 3);
  store.set_frequency("sql", 1);
  SifConfig config;
  config.frequency_mode = FrequencyMode::kRelative;
  EXPECT_DOUBLE_EQ(sif_weight(store, config, "java"), 1e-3 / (1e-3 + 0.75));
}

TEST(SifConfig, Validation) {
  SifConfig c;
  EXPECT_FALSE(c.validate().has_value());
  c.a = 1e-2;
  EXPECT_TRUE(c.validate().has_value());
  c.a = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Embed, SingleAndPairOfTokens) {
  VectorStore store = small_store();
  store.set_frequency("java", 4);
  SifEmbedder embedder(store, {});
  double w = 1e-3 / (1e-3 + 4);
  std::vector<std::string> one = {"java"};
  EXPECT_EQ(embedder.embed(one).values, scaled({1, 0, 0}, w));
  store.set_frequency("sql", 4);
  std::vector<std::string> two = {"java", "sql"};
  Embedding e = embedder.embed(two);
  EXPECT_DOUBLE_EQ(e.values[0], w * 0.5);
  EXPECT_DOUBLE_EQ(e.values[1], w * 1.0);
}

TEST(Embed, LookupOrder) {
  VectorStore store = small_store();
  SifEmbedder embedder(store, {});
  std::vector<std::string> upper = {"JAVA"};
  EXPECT_EQ(embedder.embed(upper).values, (std::vector<double>{1, 0, 0}));
  std::vector<std::string> whole = {"lập_trình"};
  EXPECT_EQ(embedder.embed(whole).values, (std::vector<double>{3, 3, 3}));
  VectorStore parts(3);
  parts.set("lập", {0, 0, 2});
  parts.set("trình", {2, 2, 2});
  SifEmbedder split(parts, {});
  EXPECT_EQ(split.embed(whole).values, (std::vector<double>{1, 1, 2}));
}

TEST(Embed, OovPolicies) {
  VectorStore store = small_store();
  std::vector<std::string> tokens = {"java", "unknown"};
  SifEmbedder skip(store, {});
  EXPECT_EQ(skip.embed(tokens).values, (std::vector<double>{1, 0, 0}));
  SifConfig zero_config;
  zero_config.oov_policy = OovPolicy::kZero;
  SifEmbedder zero(store, zero_config);
  EXPECT_EQ(zero.embed(tokens).values, (std::vector<double>{0.5, 0, 0}));
  std::vector<std::string> none = {"unknown"};
  EXPECT_FALSE(skip.try_embed(none).has_value());
  try {
    skip.embed(none);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
  }
}

TEST(Embed, PermutationInvariantAndHomogeneous) {
  Rng rng(12);
  std::normal_distribution<double> normal;
  VectorStore store(8), doubled(8);
  std::vector<std::string> words;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> v(8);
    for (double &x : v) x = normal(rng);
    std::string w = "w" + std::to_string(i);
    store.set(w, v);
    doubled.set(w, scaled(v, 2.5));
    store.set_frequency(w, i + 1);
    doubled.set_frequency(w, i + 1);
    words.push_back(w);
  }
  SifEmbedder a(store, {}), b(doubled, {});
  std::vector<std::string> s = {"w1", "w5", "w7", "w19"};
  std::vector<std::string> t = {"w19", "w7", "w1", "w5"};
  Embedding es = a.embed(s), et = a.embed(t), eb = b.embed(s);
  for (int k = 0; k < 8; ++k) {
    EXPECT_NEAR(es.values[k], et.values[k], 1e-15);
    EXPECT_NEAR(eb.values[k], 2.5 * es.values[k], 1e-15);
  }
  std::vector<std::string> u = {"w2", "w3"};
  EXPECT_NEAR(cosine(es, a.embed(u)), cosine(eb, b.embed(u)), 1e-14);
}

TEST(Embed, CommonComponentRemoval) {
  Rng rng(13);
  std::normal_distribution<double> normal;
  VectorStore store(6);
  for (int i = 0; i < 30; ++i) {
    std::vector<double> v(6);
    for (double &x : v) x = normal(rng);
    v[0] += 4;  // shared direction
    store.set("w" + std::to_string(i), v);
  }
  SifConfig config;
  config.remove_common_component = true;
  SifEmbedder embedder(store, config);
  std::vector<std::vector<std::string>> sentences;
  std::uniform_int_distribution<int> pick(0, 29);
  for (int i = 0; i < 50; ++i) {
    sentences.push_back({"w" + std::to_string(pick(rng)), "w" + std::to_string(pick(rng))});
  }
  embedder.fit_common_component(sentences);
  const auto &u = embedder.common_component();
  ASSERT_EQ(u.size(), 6u);
  EXPECT_GT(std::abs(u[0]), 0.9);
  for (const auto &s : sentences) {
    Embedding e = embedder.embed(s);
    double proj = 0;
    for (int k = 0; k < 6; ++k) proj += e.values[k] * u[k];
    EXPECT_NEAR(proj, 0.0, 1e-12);
  }
}

TEST(Cosine, Examples) {
  Embedding x{{1, 2, 3}};
  EXPECT_EQ(cosine(x, x), 1.0);
  EXPECT_EQ(cosine(Embedding{{1, 0}}, Embedding{{0, 1}}), 0.0);
  EXPECT_EQ(cosine(x, Embedding{{-1, -2, -3}}), -1.0);
  EXPECT_EQ(cosine(x, Embedding{{0, 0, 0}}), 0.0);
  EXPECT_THROW(cosine(x, Embedding{{1, 2}}), Error);
}

TEST(Cosine, BoundedAndSelfOne) {
  Rng rng(14);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    Embedding a{{u(rng), u(rng), u(rng)}}, b{{u(rng), u(rng), u(rng)}};
    double c = cosine(a, b);
    EXPECT_GE(c, -1.0);
    EXPECT_LE(c, 1.0);
    EXPECT_EQ(cosine(a, a), 1.0);
  }
}

TEST(Normalized, UnitLength) {
  Embedding e = normalized(Embedding{{3, 4}});
  EXPECT_DOUBLE_EQ(e.values[0], 0.6);
  EXPECT_DOUBLE_EQ(e.values[1], 0.8);
  EXPECT_EQ(normalized(Embedding{{0, 0}}).values, (std::vector<double>{0, 0}));
}

TEST(Frequencies, ParseFile) {
  VectorStore store = small_store();
  parse_frequencies("java\t10\nsql\t2.5\n", store);
  EXPECT_EQ(store.frequency("java"), 10);
  EXPECT_EQ(store.frequency("JAVA"), 10);
  EXPECT_EQ(store.total_frequency(), 12.5);
  EXPECT_THROW(parse_frequencies("java 10\n", store), Error);
  EXPECT_THROW(parse_frequencies("java\t-1\n", store), Error);
}

}  // namespace
}  // namespace skillminer
