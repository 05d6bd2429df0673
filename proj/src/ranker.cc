#include "skillminer/ranker.h"

#include <algorithm>

#include "skillminer/common.h"
#include "skillminer/text.h"

namespace skillminer {

std::vector<RankedPhrase> rank_phrases(const TextEmbedder &embedder,
                                       const std::vector<std::string> &phrases,
                                       const Section &section,
                                       const std::string &doc_id,
                                       size_t section_index) {
  std::vector<std::string> section_tokens = section.keys();
  std::optional<Embedding> context = embedder.try_embed(section_tokens);
  if (!context) {
    throw Error(ErrorKind::kData, "section " + std::to_string(section_index) + " of '" +
                                      doc_id + "' has no embeddable token");
  }
  std::vector<RankedPhrase> out(phrases.size());
  for (size_t i = 0; i < phrases.size(); ++i) {
    RankedPhrase &r = out[i];
    r.phrase = phrases[i];
    r.doc_id = doc_id;
    r.section_index = section_index;
    std::vector<std::string> tokens = text::split_whitespace(phrases[i]);
    std::optional<Embedding> v = embedder.try_embed(tokens);
    if (v) {
      r.score = cosine(*v, *context);
    } else {
      r.embeddable = false;
      r.score = 0;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedPhrase &a, const RankedPhrase &b) {
    return a.score > b.score;
  });
  return out;
}

std::vector<RankedPhrase> filter_by_threshold(const std::vector<RankedPhrase> &ranked,
                                              double threshold) {
  std::vector<RankedPhrase> out;
  for (const RankedPhrase &r : ranked) {
    if (r.score >= threshold) out.push_back(r);
  }
  return out;
}

std::string format_ranked(const std::vector<RankedPhrase> &ranked) {
  std::string out;
  for (const RankedPhrase &r : ranked) {
    out += r.doc_id + "\t" + std::to_string(r.section_index) + "\t" + r.phrase + "\t" +
           format_double(r.score) + "\n";
  }
  return out;
}

}  // namespace skillminer
