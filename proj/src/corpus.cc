/*!
 *  Copyright (c) 2026 by Contributors
 * \file corpus.cc
 */
#include <dialtree/corpus.h>
#include <dialtree/error.h>
#include <dialtree/meaning_representation.h>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace dialtree {

namespace {

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

Corpus IngestCorpus(std::string_view text) {
  Corpus corpus;
  std::map<TurnKey, std::size_t> lines;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> fields = SplitTabs(line);
    if (fields.size() != 4 && fields.size() != 5) {
      throw FormatError("expected 4 or 5 tab-separated fields, found " + std::to_string(fields.size()),
                        line_no);
    }
    CorpusRecord rec;
    rec.dialogue_id = std::string(fields[0]);
    if (rec.dialogue_id.empty()) throw FormatError("empty dialogue id", line_no);
    const std::string index(fields[1]);
    if (index.empty() || index.find_first_not_of("0123456789") != std::string::npos ||
        index.size() > 9) {
      throw FormatError("bad turn index '" + index + "'", line_no);
    }
    rec.turn_index = std::stoul(index);
    rec.agent_text = UnescapeField(fields[2]);
    rec.user_text = UnescapeField(fields[3]);
    if (fields.size() == 5) {
      rec.reference_annotation = UnescapeField(fields[4]);
      try {
        ParseAnnotation(*rec.reference_annotation);
      } catch (const Error& e) {
        throw AnnotationParseError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    auto [it, fresh] = lines.emplace(rec.key(), line_no);
    if (!fresh) {
      throw DuplicateKeyError("turn " + rec.key().ToString() + " on line " + std::to_string(line_no) +
                              " repeats line " + std::to_string(it->second));
    }
    corpus.push_back(std::move(rec));
  }
  std::sort(corpus.begin(), corpus.end(),
            [](const CorpusRecord& a, const CorpusRecord& b) { return a.key() < b.key(); });
  for (std::size_t i = 1; i < corpus.size(); ++i) {
    const CorpusRecord& prev = corpus[i - 1];
    const CorpusRecord& cur = corpus[i];
    if (prev.dialogue_id == cur.dialogue_id && cur.turn_index != prev.turn_index + 1) {
      throw FormatError("turn indices of dialogue '" + cur.dialogue_id + "' are not consecutive at " +
                            std::to_string(cur.turn_index),
                        lines.at(cur.key()));
    }
  }
  return corpus;
}

Corpus IngestCorpusFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open corpus '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return IngestCorpus(buffer.str());
}

std::string WriteCorpus(const Corpus& corpus) {
  std::string out;
  for (const CorpusRecord& r : corpus) {
    out += r.dialogue_id + "\t" + std::to_string(r.turn_index) + "\t" + EscapeField(r.agent_text) +
           "\t" + EscapeField(r.user_text);
    if (r.reference_annotation) out += "\t" + EscapeField(*r.reference_annotation);
    out += "\n";
  }
  return out;
}

AnnotationSet ReferenceAnnotations(const Corpus& corpus) {
  AnnotationSet out;
  for (const CorpusRecord& r : corpus) {
    if (!r.reference_annotation) continue;
    AnnotationEntry e;
    e.text = *r.reference_annotation;
    e.mode = AnnotationMode::kHuman;
    out.emplace(r.key(), std::move(e));
  }
  return out;
}

std::size_t CountDialogues(const Corpus& corpus) {
  std::set<std::string> ids;
  for (const CorpusRecord& r : corpus) ids.insert(r.dialogue_id);
  return ids.size();
}

std::vector<DialogueTurnPair> HistoryUpTo(const Corpus& corpus, std::size_t record) {
  const std::string& id = corpus.at(record).dialogue_id;
  std::size_t first = record;
  while (first > 0 && corpus[first - 1].dialogue_id == id) --first;
  std::vector<DialogueTurnPair> out;
  for (std::size_t i = first; i <= record; ++i) {
    out.push_back({corpus[i].agent_text, corpus[i].user_text, corpus[i].turn_index});
  }
  return out;
}

std::string PromptFor(const Corpus& corpus, std::size_t record, std::size_t window) {
  return RenderPrompt(TruncateHistory(HistoryUpTo(corpus, record), window));
}

std::vector<std::string> ReplayPieces(const OntologySpec& ontology, const Corpus& corpus) {
  std::set<std::string> pieces = {" (", " :", " /", " \""};
  for (const auto& [name, category] : ontology.concepts()) {
    pieces.insert(" / " + name);
    pieces.insert(name);
  }
  for (const RelationRule& r : ontology.relations()) {
    pieces.insert(" :" + r.label);
    pieces.insert(r.label);
  }
  auto add_words = [&](std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t b = text.find_first_not_of(" \t\r\n", pos);
      if (b == std::string_view::npos) break;
      std::size_t e = text.find_first_of(" \t\r\n", b);
      if (e == std::string_view::npos) e = text.size();
      std::string word(text.substr(b, e - b));
      if (word.find_first_of("\"\\") == std::string::npos) {
        pieces.insert(word);
        pieces.insert(" " + word);
      }
      pos = e;
    }
  };
  for (const CorpusRecord& r : corpus) {
    add_words(r.agent_text);
    add_words(r.user_text);
  }
  return std::vector<std::string>(pieces.begin(), pieces.end());
}

std::string MakeReplayJsonl(const Corpus& corpus, std::size_t window,
                            const std::vector<std::string>& pieces) {
  std::string out;
  if (!pieces.empty()) out += nlohmann::json({{"pieces", pieces}}).dump() + "\n";
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!corpus[i].reference_annotation) continue;
    nlohmann::json j = {{"prompt", PromptFor(corpus, i, window)},
                        {"response", *corpus[i].reference_annotation}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace dialtree
