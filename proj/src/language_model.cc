/*!
 *  Copyright (c) 2026 by Contributors
 * \file language_model.cc
 */
#include <dialtree/error.h>
#include <dialtree/language_model.h>
#include <dialtree/line_json_process.h>
#include <dialtree/random.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dialtree {

namespace {

constexpr std::string_view kPreamble =
    "Below is an instruction that describes a task, paired with an input that provides further "
    "context. Write a response that appropriately completes the request.";
constexpr std::string_view kInstruction =
    "### Instruction: Provide the tree annotation of what is said by the user in the given "
    "dialogue.";

void LogSoftmaxInPlace(std::vector<double>* logits) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : *logits) top = std::max(top, v);
  if (!std::isfinite(top)) return;
  double sum = 0.0;
  for (double v : *logits) sum += std::exp(v - top);
  double lse = top + std::log(sum);
  for (double& v : *logits) v -= lse;
}

}  // namespace

std::vector<double> NextTokenLogprobs(LanguageModel& lm, std::span<const TokenId> context) {
  if (context.empty()) throw SessionError("next-token query needs a non-empty context");
  std::vector<double> out = lm.NextTokenLogprobs(context);
  if (out.size() != lm.VocabSize()) {
    throw SessionError("model returned " + std::to_string(out.size()) + " logprobs for a vocabulary of " +
                       std::to_string(lm.VocabSize()));
  }
  return out;
}

// ---------------------------------------------------------------------------

ReplayLm::ReplayLm(std::shared_ptr<const Tokenizer> tokenizer, std::vector<Entry> entries)
    : tok_(std::move(tokenizer)), entries_(std::move(entries)) {
  for (const Entry& e : entries_) prompt_tokens_.push_back(tok_->Encode(e.prompt));
  fallback_.push_back(tok_->Eos());
  for (std::string_view closer : {")", "\""}) {
    std::vector<TokenId> t = tok_->Encode(closer);
    if (t.size() == 1) fallback_.push_back(t[0]);
  }
}

ReplayLm ReplayLm::FromResponses(
    std::shared_ptr<const Tokenizer> tokenizer,
    const std::vector<std::pair<std::string, std::string>>& responses) {
  std::vector<Entry> entries;
  for (const auto& [prompt, response] : responses) {
    Entry e{prompt, {}};
    for (TokenId t : tokenizer->Encode(response)) e.steps.push_back({t});
    e.steps.push_back({tokenizer->Eos()});
    entries.push_back(std::move(e));
  }
  return ReplayLm(std::move(tokenizer), std::move(entries));
}

ReplayLm ReplayLm::Load(std::shared_ptr<const Tokenizer> tokenizer, std::string_view jsonl) {
  std::vector<Entry> entries;
  std::size_t pos = 0, line_no = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed replay entry: ") + e.what(), line_no);
    }
    if (j.is_object() && j.contains("pieces") && entries.empty() && !j.contains("prompt")) continue;
    if (!j.is_object() || !j.contains("prompt") || !j["prompt"].is_string()) {
      throw FormatError("replay entry needs a string \"prompt\"", line_no);
    }
    Entry e{j["prompt"].get<std::string>(), {}};
    if (j.contains("steps")) {
      try {
        e.steps = j["steps"].get<std::vector<std::vector<TokenId>>>();
      } catch (const nlohmann::json::exception&) {
        throw FormatError("\"steps\" must be a list of token-id lists", line_no);
      }
    } else if (j.contains("response") && j["response"].is_string()) {
      for (TokenId t : tokenizer->Encode(j["response"].get<std::string>())) e.steps.push_back({t});
      e.steps.push_back({tokenizer->Eos()});
    } else {
      throw FormatError("replay entry needs \"response\" or \"steps\"", line_no);
    }
    entries.push_back(std::move(e));
  }
  return ReplayLm(std::move(tokenizer), std::move(entries));
}

namespace {

std::string ReadReplayFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open replay file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

ReplayLm ReplayLm::LoadFile(std::shared_ptr<const Tokenizer> tokenizer, const std::string& path) {
  return Load(std::move(tokenizer), ReadReplayFile(path));
}

ReplayLm ReplayLm::LoadWithVocabulary(std::string_view jsonl) {
  std::shared_ptr<const Tokenizer> tok;
  std::size_t start = jsonl.find_first_not_of(" \t\r\n");
  if (start != std::string_view::npos) {
    std::size_t end = jsonl.find('\n', start);
    std::string_view first = jsonl.substr(start, end == std::string_view::npos ? end : end - start);
    nlohmann::json j = nlohmann::json::parse(first, nullptr, false);
    if (j.is_object() && j.contains("pieces")) {
      try {
        tok = std::make_shared<VocabTokenizer>(j["pieces"].get<std::vector<std::string>>());
      } catch (const nlohmann::json::exception&) {
        throw FormatError("\"pieces\" must be a list of strings", 1);
      }
    }
  }
  if (!tok) tok = std::make_shared<ByteTokenizer>();
  return Load(std::move(tok), jsonl);
}

ReplayLm ReplayLm::LoadFileWithVocabulary(const std::string& path) {
  return LoadWithVocabulary(ReadReplayFile(path));
}

std::vector<double> ReplayLm::NextTokenLogprobs(std::span<const TokenId> context) {
  const Entry* match = nullptr;
  std::size_t match_len = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const std::vector<TokenId>& p = prompt_tokens_[i];
    if (p.size() > context.size() || (match && p.size() <= match_len)) continue;
    if (std::equal(p.begin(), p.end(), context.begin())) {
      match = &entries_[i];
      match_len = p.size();
    }
  }
  std::vector<TokenId> prefs;
  if (match) {
    std::size_t step = context.size() - match_len;
    if (step < match->steps.size()) prefs = match->steps[step];
  }
  for (TokenId t : fallback_) {
    if (std::find(prefs.begin(), prefs.end(), t) == prefs.end()) prefs.push_back(t);
  }
  std::vector<double> logits(VocabSize(), -50.0);
  for (std::size_t k = 0; k < prefs.size(); ++k) {
    TokenId t = prefs[k];
    if (t >= 0 && static_cast<std::size_t>(t) < logits.size() && logits[t] == -50.0) {
      logits[t] = -static_cast<double>(k);
    }
  }
  LogSoftmaxInPlace(&logits);
  return logits;
}

// ---------------------------------------------------------------------------

std::vector<double> RandomLm::NextTokenLogprobs(std::span<const TokenId> context) {
  std::uint64_t h = 14695981039346656037ULL;
  for (TokenId t : context) {
    std::uint32_t u = static_cast<std::uint32_t>(t);
    char bytes[4] = {static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                     static_cast<char>((u >> 16) & 0xff), static_cast<char>((u >> 24) & 0xff)};
    h = Fnv1a64(std::string_view(bytes, 4), h);
  }
  Rng rng(MixSeed(seed_, h));
  std::vector<double> logits(VocabSize());
  for (double& v : logits) v = rng.Uniform();
  LogSoftmaxInPlace(&logits);
  return logits;
}

// ---------------------------------------------------------------------------

ProcessLm::ProcessLm(const std::string& command)
    : proc_(std::make_unique<LineJsonProcess>(command)) {
  nlohmann::json reply = proc_->Request({{"op", "vocab_size"}});
  try {
    vocab_size_ = reply.at("n").get<std::size_t>();
    eos_ = reply.contains("eos") ? reply["eos"].get<TokenId>()
                                 : static_cast<TokenId>(vocab_size_) - 1;
  } catch (const nlohmann::json::exception& e) {
    throw SessionError(std::string("bad vocab_size reply: ") + e.what());
  }
  if (vocab_size_ == 0) throw SessionError("model reports an empty vocabulary");
}

ProcessLm::~ProcessLm() = default;

std::vector<TokenId> ProcessLm::Encode(std::string_view text) const {
  nlohmann::json reply = proc_->Request({{"op", "tokenize"}, {"text", std::string(text)}});
  try {
    return reply.at("tokens").get<std::vector<TokenId>>();
  } catch (const nlohmann::json::exception& e) {
    throw SessionError(std::string("bad tokenize reply: ") + e.what());
  }
}

std::string ProcessLm::Decode(std::span<const TokenId> tokens) const {
  nlohmann::json reply = proc_->Request(
      {{"op", "detokenize"}, {"tokens", std::vector<TokenId>(tokens.begin(), tokens.end())}});
  try {
    // "bytes" carries token texts that are not valid UTF-8 on their own
    if (reply.contains("bytes")) {
      std::string out;
      for (int b : reply["bytes"].get<std::vector<int>>()) out.push_back(static_cast<char>(b));
      return out;
    }
    return reply.at("text").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw SessionError(std::string("bad detokenize reply: ") + e.what());
  }
}

std::string ProcessLm::TokenText(TokenId token) const {
  auto it = text_cache_.find(token);
  if (it != text_cache_.end()) return it->second;
  std::string text = token == eos_ ? std::string() : Decode(std::span<const TokenId>(&token, 1));
  text_cache_.emplace(token, text);
  return text;
}

std::vector<double> ProcessLm::NextTokenLogprobs(std::span<const TokenId> context) {
  nlohmann::json reply = proc_->Request(
      {{"op", "logprobs"}, {"context", std::vector<TokenId>(context.begin(), context.end())}});
  std::vector<double> out;
  try {
    const nlohmann::json& arr = reply.at("logprobs");
    out.reserve(arr.size());
    for (const nlohmann::json& v : arr) {
      out.push_back(v.is_null() ? -std::numeric_limits<double>::infinity() : v.get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw SessionError(std::string("bad logprobs reply: ") + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------

std::unique_ptr<LanguageModel> MakeLanguageModel(const std::string& spec) {
  std::size_t colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("model spec '" + spec + "' lacks a scheme");
  std::string scheme = spec.substr(0, colon);
  std::string arg = spec.substr(colon + 1);
  if (scheme == "replay") return std::make_unique<ReplayLm>(ReplayLm::LoadFileWithVocabulary(arg));
  auto bytes = std::make_shared<ByteTokenizer>();
  if (scheme == "random") {
    char* end = nullptr;
    std::uint64_t seed = std::strtoull(arg.c_str(), &end, 10);
    if (arg.empty() || *end != '\0') throw ConfigError("random model seed '" + arg + "' is not an integer");
    return std::make_unique<RandomLm>(bytes, seed);
  }
  if (scheme == "proc") return std::make_unique<ProcessLm>(arg);
  throw ConfigError("unknown model scheme '" + scheme + "'");
}

// ---------------------------------------------------------------------------

std::string RenderPrompt(const std::vector<DialogueTurnPair>& history) {
  if (history.empty()) throw EmptyHistoryError("cannot render a prompt without dialogue turns");
  std::string out(kPreamble);
  out += '\n';
  out += kInstruction;
  out += "\n### Input:";
  for (const DialogueTurnPair& pair : history) {
    out += " agent: ";
    out += pair.agent;
    out += "; user: ";
    out += pair.user;
  }
  out += "\n### Response:\n";
  return out;
}

std::vector<DialogueTurnPair> TruncateHistory(const std::vector<DialogueTurnPair>& history,
                                              std::size_t window) {
  std::size_t keep = std::min(history.size(), window + 1);
  return std::vector<DialogueTurnPair>(history.end() - static_cast<std::ptrdiff_t>(keep),
                                       history.end());
}

}  // namespace dialtree
