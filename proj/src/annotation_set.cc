/*!
 *  Copyright (c) 2026 by Contributors
 * \file annotation_set.cc
 */
#include <dialtree/annotation_set.h>
#include <dialtree/error.h>
#include <dialtree/meaning_representation.h>

#include <cstdio>
#include <cstdlib>
#include <vector>

namespace dialtree {

std::string_view ModeName(AnnotationMode mode) {
  switch (mode) {
    case AnnotationMode::kUnconstrained:
      return "unconstrained";
    case AnnotationMode::kConstrained:
      return "constrained";
    case AnnotationMode::kMerged:
      return "merged";
    case AnnotationMode::kHuman:
      return "human";
  }
  return "?";
}

AnnotationMode ParseMode(std::string_view name) {
  if (name == "unconstrained") return AnnotationMode::kUnconstrained;
  if (name == "constrained") return AnnotationMode::kConstrained;
  if (name == "merged") return AnnotationMode::kMerged;
  if (name == "human") return AnnotationMode::kHuman;
  throw FormatError("unknown annotation mode '" + std::string(name) + "'");
}

std::string_view StatusName(TurnStatus status) {
  switch (status) {
    case TurnStatus::kOk:
      return "ok";
    case TurnStatus::kParseError:
      return "parse-error";
    case TurnStatus::kTruncated:
      return "truncated";
    case TurnStatus::kDeadEnd:
      return "dead-end";
    case TurnStatus::kFailed:
      return "failed";
  }
  return "?";
}

TurnStatus ParseStatus(std::string_view name) {
  for (TurnStatus s : {TurnStatus::kOk, TurnStatus::kParseError, TurnStatus::kTruncated,
                       TurnStatus::kDeadEnd, TurnStatus::kFailed}) {
    if (StatusName(s) == name) return s;
  }
  throw FormatError("unknown turn status '" + std::string(name) + "'");
}

std::string EscapeField(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

std::string UnescapeField(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\' || i + 1 == text.size()) {
      out.push_back(text[i]);
      continue;
    }
    char e = text[++i];
    switch (e) {
      case 't':
        out.push_back('\t');
        break;
      case 'n':
        out.push_back('\n');
        break;
      case 'r':
        out.push_back('\r');
        break;
      default:
        out.push_back(e);
    }
  }
  return out;
}

std::string WriteAnnotationSet(const AnnotationSet& set) {
  std::string out(kAnnotationSetHeader);
  out.push_back('\n');
  char score[64];
  for (const auto& [key, entry] : set) {
    if (entry.predicted_score) {
      std::snprintf(score, sizeof(score), "%.17g", *entry.predicted_score);
    } else {
      std::snprintf(score, sizeof(score), "-");
    }
    out += EscapeField(key.dialogue_id);
    out += '\t' + std::to_string(key.turn_index);
    out += '\t';
    out += ModeName(entry.mode);
    out += '\t';
    out += StatusName(entry.status);
    out += '\t';
    out += score;
    out += '\t';
    out += EscapeField(entry.text);
    out += '\n';
  }
  return out;
}

AnnotationSet ReadAnnotationSet(std::string_view text) {
  AnnotationSet set;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != kAnnotationSetHeader) throw FormatError("missing annotation-set header", line_no);
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string_view::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() != 6) throw FormatError("expected 6 tab-separated fields", line_no);
    TurnKey key{UnescapeField(fields[0]), 0};
    char* stop = nullptr;
    std::string index(fields[1]);
    key.turn_index = std::strtoull(index.c_str(), &stop, 10);
    if (index.empty() || *stop != '\0') throw FormatError("bad turn index '" + index + "'", line_no);
    AnnotationEntry entry;
    try {
      entry.mode = ParseMode(fields[2]);
      entry.status = ParseStatus(fields[3]);
    } catch (const FormatError& e) {
      throw FormatError(e.what(), line_no);
    }
    if (fields[4] != "-") {
      std::string score(fields[4]);
      entry.predicted_score = std::strtod(score.c_str(), &stop);
      if (*stop != '\0') throw FormatError("bad score '" + score + "'", line_no);
    }
    entry.text = UnescapeField(fields[5]);
    try {
      ParseAnnotation(entry.text);
      entry.parse_ok = true;
    } catch (const Error&) {
      entry.parse_ok = false;
    }
    if (!set.emplace(key, std::move(entry)).second) {
      throw DuplicateKeyError("duplicate key " + key.ToString() + " at line " +
                              std::to_string(line_no));
    }
  }
  if (!header_seen) throw FormatError("missing annotation-set header", 1);
  return set;
}

}  // namespace dialtree
