#ifndef SKILLMINER_RANKER_H_
#define SKILLMINER_RANKER_H_

#include <string>
#include <vector>

#include "skillminer/corpus.h"
#include "skillminer/embedding.h"

namespace skillminer {

struct RankedPhrase {
  std::string phrase;  // space-separated tokens
  double score = 0;    // cosine(v_phrase, v_section)
  std::string doc_id;
  size_t section_index = 0;
  bool embeddable = true;  // false: no token had a vector, score forced to 0
};

// Ranks each phrase against the embedding of the whole section. Output is
// sorted by descending score; equal scores keep input order. Throws when
// the section itself cannot be embedded.
std::vector<RankedPhrase> rank_phrases(const TextEmbedder &embedder,
                                       const std::vector<std::string> &phrases,
                                       const Section &section,
                                       const std::string &doc_id = "",
                                       size_t section_index = 0);

// Keeps phrases with score >= threshold, preserving order.
std::vector<RankedPhrase> filter_by_threshold(const std::vector<RankedPhrase> &ranked,
                                              double threshold = 0.5);

// doc_id<TAB>section_index<TAB>phrase<TAB>score
std::string format_ranked(const std::vector<RankedPhrase> &ranked);

}  // namespace skillminer

#endif  // SKILLMINER_RANKER_H_
