#include "skillminer/evaluator.h"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

#include "skillminer/common.h"
#include "skillminer/text.h"

namespace skillminer {

using json = nlohmann::json;

namespace {

bool is_separator(char32_t cp) { return cp == '_' || text::is_space(cp); }

std::vector<Span> parse_spans(const json &array, const std::string &where) {
  if (!array.is_array()) throw Error(ErrorKind::kInput, where + ": spans must be an array");
  std::vector<Span> out;
  for (const json &item : array) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number_unsigned() ||
        !item[1].is_number_unsigned()) {
      throw Error(ErrorKind::kInput, where + ": span must be [start, end]");
    }
    Span s{item[0].get<size_t>(), item[1].get<size_t>()};
    if (s.end <= s.start) throw Error(ErrorKind::kInput, where + ": span end must exceed start");
    out.push_back(s);
  }
  return out;
}

json spans_to_json(const std::vector<Span> &spans) {
  json out = json::array();
  for (const Span &s : spans) out.push_back(json::array({s.start, s.end}));
  return out;
}

template <typename Fn>
void for_each_json_line(std::string_view content, const char *what, Fn fn) {
  size_t pos = 0, line_no = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    std::string where = std::string(what) + " line " + std::to_string(line_no);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error &e) {
      throw Error(ErrorKind::kInput, where + ": malformed JSON: " + e.what());
    }
    if (!record.is_object() || !record.contains("doc_id") || !record["doc_id"].is_string()) {
      throw Error(ErrorKind::kInput, where + ": missing doc_id");
    }
    fn(record, where);
  }
}

json metrics_to_json(const Metrics &m) {
  json out;
  out["precision"] = m.precision;
  out["recall"] = m.recall;
  out["f1"] = m.f1;
  out["tp"] = m.counts.tp;
  out["fp"] = m.counts.fp;
  out["fn"] = m.counts.fn;
  return out;
}

Metrics metrics_from_json(const json &j) {
  Metrics m;
  m.precision = j.at("precision").get<double>();
  m.recall = j.at("recall").get<double>();
  m.f1 = j.at("f1").get<double>();
  m.counts.tp = j.at("tp").get<uint64_t>();
  m.counts.fp = j.at("fp").get<uint64_t>();
  m.counts.fn = j.at("fn").get<uint64_t>();
  return m;
}

}  // namespace

uint64_t count_matches(const std::vector<Span> &gold, const std::vector<Span> &predicted,
                       MatchMode mode) {
  std::vector<bool> used(gold.size(), false);
  uint64_t tp = 0;
  for (const Span &p : predicted) {
    for (size_t g = 0; g < gold.size(); ++g) {
      if (used[g]) continue;
      bool hit = mode == MatchMode::kFull ? gold[g] == p : gold[g].overlaps(p);
      if (hit) {
        used[g] = true;
        ++tp;
        break;
      }
    }
  }
  return tp;
}

Metrics metrics_from_counts(const MatchCounts &counts) {
  Metrics m;
  m.counts = counts;
  uint64_t predicted = counts.tp + counts.fp;
  uint64_t actual = counts.tp + counts.fn;
  m.precision = predicted ? static_cast<double>(counts.tp) / static_cast<double>(predicted) : 0.0;
  m.recall = actual ? static_cast<double>(counts.tp) / static_cast<double>(actual) : 0.0;
  m.f1 = m.precision + m.recall > 0
             ? 2 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

EvalReport evaluate(const std::vector<GoldDocument> &gold,
                    const std::vector<PredictionSet> &predictions) {
  std::unordered_map<std::string, size_t> index;
  for (size_t i = 0; i < gold.size(); ++i) index.emplace(gold[i].doc_id, i);
  std::vector<std::vector<Span>> per_doc(gold.size());
  size_t total_predicted = 0;
  for (const PredictionSet &p : predictions) {
    auto it = index.find(p.doc_id);
    if (it == index.end()) {
      throw Error(ErrorKind::kData, "prediction for unknown document '" + p.doc_id + "'");
    }
    const size_t length = text::decode_utf8(gold[it->second].text).size();
    for (const Span &s : p.spans) {
      if (s.end <= s.start || s.end > length) {
        throw Error(ErrorKind::kData, "prediction span outside document '" + p.doc_id + "'");
      }
    }
    auto &spans = per_doc[it->second];
    spans.insert(spans.end(), p.spans.begin(), p.spans.end());
    total_predicted += p.spans.size();
  }
  MatchCounts full, partial;
  for (size_t i = 0; i < gold.size(); ++i) {
    const auto &g = gold[i].spans;
    const auto &p = per_doc[i];
    uint64_t tp_full = count_matches(g, p, MatchMode::kFull);
    uint64_t tp_partial = count_matches(g, p, MatchMode::kPartial);
    full.tp += tp_full;
    full.fp += p.size() - tp_full;
    full.fn += g.size() - tp_full;
    partial.tp += tp_partial;
    partial.fp += p.size() - tp_partial;
    partial.fn += g.size() - tp_partial;
  }
  EvalReport report;
  report.full = metrics_from_counts(full);
  report.partial = metrics_from_counts(partial);
  report.empty_predictions = total_predicted == 0;
  return report;
}

std::vector<Span> span_align(std::string_view text_in, std::string_view phrase) {
  std::u32string text = text::decode_utf8(text_in);
  for (char32_t &cp : text) cp = text::to_lower(cp);
  std::vector<std::u32string> words;
  {
    std::u32string p = text::decode_utf8(phrase);
    std::u32string current;
    for (char32_t cp : p) {
      if (is_separator(cp)) {
        if (!current.empty()) words.push_back(std::move(current));
        current.clear();
      } else {
        current.push_back(text::to_lower(cp));
      }
    }
    if (!current.empty()) words.push_back(std::move(current));
  }
  std::vector<Span> out;
  if (words.empty()) return out;
  size_t i = 0;
  while (i < text.size()) {
    if (i > 0 && text::is_word_char(text[i - 1])) {
      ++i;
      continue;
    }
    size_t pos = i;
    bool ok = true;
    for (size_t w = 0; w < words.size() && ok; ++w) {
      if (w > 0) {
        size_t sep = pos;
        while (pos < text.size() && is_separator(text[pos])) ++pos;
        if (pos == sep) ok = false;
      }
      if (ok && text.compare(pos, words[w].size(), words[w]) == 0) {
        pos += words[w].size();
      } else {
        ok = false;
      }
    }
    if (ok && (pos == text.size() || !text::is_word_char(text[pos]))) {
      out.push_back({i, pos});
      i = pos;
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<GoldDocument> parse_gold(std::string_view content) {
  std::vector<GoldDocument> out;
  std::unordered_map<std::string, bool> seen;
  for_each_json_line(content, "gold", [&](const json &record, const std::string &where) {
    GoldDocument doc;
    doc.doc_id = record["doc_id"].get<std::string>();
    if (!seen.emplace(doc.doc_id, true).second) {
      throw Error(ErrorKind::kInput, where + ": duplicate doc_id '" + doc.doc_id + "'");
    }
    if (!record.contains("text") || !record["text"].is_string()) {
      throw Error(ErrorKind::kInput, where + ": missing text");
    }
    doc.text = record["text"].get<std::string>();
    doc.spans = parse_spans(record.value("spans", json::array()), where);
    const size_t length = text::decode_utf8(doc.text).size();
    std::vector<Span> sorted = doc.spans;
    std::sort(sorted.begin(), sorted.end(),
              [](const Span &a, const Span &b) { return a.start < b.start; });
    for (size_t k = 0; k < sorted.size(); ++k) {
      if (sorted[k].end > length) throw Error(ErrorKind::kInput, where + ": span beyond text");
      if (k > 0 && sorted[k - 1].overlaps(sorted[k])) {
        throw Error(ErrorKind::kInput, where + ": overlapping gold spans");
      }
    }
    out.push_back(std::move(doc));
  });
  return out;
}

std::string format_gold(const std::vector<GoldDocument> &docs) {
  std::string out;
  for (const GoldDocument &doc : docs) {
    json record;
    record["doc_id"] = doc.doc_id;
    record["text"] = doc.text;
    record["spans"] = spans_to_json(doc.spans);
    out += record.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
  }
  return out;
}

std::vector<PredictionSet> parse_predictions(std::string_view content) {
  std::vector<PredictionSet> out;
  for_each_json_line(content, "predictions", [&](const json &record, const std::string &where) {
    PredictionSet p;
    p.doc_id = record["doc_id"].get<std::string>();
    p.spans = parse_spans(record.value("spans", json::array()), where);
    out.push_back(std::move(p));
  });
  return out;
}

std::string format_predictions(const std::vector<PredictionSet> &predictions) {
  std::string out;
  for (const PredictionSet &p : predictions) {
    json record;
    record["doc_id"] = p.doc_id;
    record["spans"] = spans_to_json(p.spans);
    out += record.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
  }
  return out;
}

std::vector<PredictionSet> predictions_from_phrase_tsv(std::string_view content,
                                                       const std::vector<GoldDocument> &gold,
                                                       size_t phrase_column,
                                                       std::vector<std::string> *warnings) {
  std::unordered_map<std::string, size_t> index;
  for (size_t i = 0; i < gold.size(); ++i) index.emplace(gold[i].doc_id, i);
  std::vector<PredictionSet> out;
  std::unordered_map<std::string, size_t> slot;
  size_t pos = 0, line_no = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    for (size_t start = 0;;) {
      size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (line_no == 1 && fields[0] == "doc_id") continue;
    if (fields.size() <= phrase_column) {
      throw Error(ErrorKind::kInput, "phrase TSV line " + std::to_string(line_no) +
                                         ": missing phrase column");
    }
    std::string doc_id(fields[0]);
    auto it = index.find(doc_id);
    if (it == index.end()) {
      throw Error(ErrorKind::kData, "phrase TSV line " + std::to_string(line_no) +
                                        ": unknown document '" + doc_id + "'");
    }
    auto [s, inserted] = slot.try_emplace(doc_id, out.size());
    if (inserted) out.push_back({doc_id, {}});
    std::vector<Span> found = span_align(gold[it->second].text, fields[phrase_column]);
    if (found.empty() && warnings != nullptr) {
      warnings->push_back("phrase '" + std::string(fields[phrase_column]) +
                          "' not found in document '" + doc_id + "'");
    }
    auto &spans = out[s->second].spans;
    for (const Span &span : found) {
      if (std::find(spans.begin(), spans.end(), span) == spans.end()) spans.push_back(span);
    }
  }
  return out;
}

std::string report_to_json(const EvalReport &report) {
  json root;
  root["format_version"] = 1;
  root["kind"] = "eval_report";
  root["full"] = metrics_to_json(report.full);
  root["partial"] = metrics_to_json(report.partial);
  root["empty_predictions"] = report.empty_predictions;
  return root.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view content) {
  json root;
  try {
    root = json::parse(content);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::kInput, std::string("eval report: ") + e.what());
  }
  if (root.value("kind", "") != "eval_report") {
    throw Error(ErrorKind::kInput, "not an eval_report artifact");
  }
  EvalReport report;
  report.full = metrics_from_json(root.at("full"));
  report.partial = metrics_from_json(root.at("partial"));
  report.empty_predictions = root.at("empty_predictions").get<bool>();
  return report;
}

}  // namespace skillminer
