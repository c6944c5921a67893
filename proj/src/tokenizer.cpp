#include "sadkit/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <json.hpp>

namespace sadkit {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

}  // namespace

std::vector<RawToken> lex(const std::string& doc) {
  std::vector<RawToken> tokens;
  const std::string reason_marker = kReasonMarker;
  const std::string act_marker = kActMarker;
  std::size_t i = 0;
  while (i < doc.size()) {
    if (is_space(doc[i])) {
      ++i;
      continue;
    }
    std::size_t begin = i;
    if (doc.compare(i, reason_marker.size(), reason_marker) == 0) {
      i += reason_marker.size();
    } else if (doc.compare(i, act_marker.size(), act_marker) == 0) {
      i += act_marker.size();
    } else if (is_word_char(doc[i])) {
      while (i < doc.size() && is_word_char(doc[i])) ++i;
    } else if (doc[i] == '\'') {
      ++i;
      while (i < doc.size() && is_word_char(doc[i])) ++i;
    } else {
      ++i;  // single punctuation character
    }
    tokens.push_back({doc.substr(begin, i - begin), {begin, i}});
  }
  return tokens;
}

Vocab build_vocab(const std::vector<std::string>& corpus, int min_count) {
  if (corpus.empty()) throw SadError(ErrorKind::EmptyCorpus, "build_vocab on empty corpus");

  std::unordered_map<std::string, std::size_t> counts;
  for (const std::string& doc : corpus) {
    for (const RawToken& t : lex(doc)) ++counts[t.text];
  }

  Vocab vocab;
  vocab.id_to_token = {"<pad>", "<bos>", "<unk>", kReasonMarker, kActMarker};
  for (int id = 0; id < Vocab::kNumSpecials; ++id) {
    vocab.token_to_id[vocab.id_to_token[id]] = id;
  }

  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (const auto& [token, count] : counts) {
    if (count < static_cast<std::size_t>(min_count)) continue;
    if (vocab.token_to_id.contains(token)) continue;  // marker strings stay special
    ranked.emplace_back(token, count);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (const auto& [token, count] : ranked) {
    vocab.token_to_id[token] = vocab.size();
    vocab.id_to_token.push_back(token);
  }
  return vocab;
}

void Vocab::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw SadError(ErrorKind::IoError, "cannot write " + path);
  nlohmann::json j{{"tokens", id_to_token}};
  out << j.dump() << '\n';
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SadError(ErrorKind::IoError, "cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("tokens")) {
    throw SadError(ErrorKind::CorruptFile, "invalid vocab file: " + path);
  }
  Vocab vocab;
  vocab.id_to_token = j.at("tokens").get<std::vector<std::string>>();
  if (vocab.size() < kNumSpecials) {
    throw SadError(ErrorKind::CorruptFile, "vocab file missing special tokens: " + path);
  }
  for (int id = 0; id < vocab.size(); ++id) {
    vocab.token_to_id[vocab.id_to_token[id]] = id;
  }
  return vocab;
}

TokenizedTrajectory tokenize_with_offsets(const std::string& doc, const Vocab& vocab) {
  TokenizedTrajectory tok;
  for (const RawToken& t : lex(doc)) {
    tok.token_ids.push_back(vocab.lookup(t.text));
    tok.offsets.push_back(t.range);
    tok.labels.push_back(TokenLabel::None);
  }
  return tok;
}

void label_tokens(TokenizedTrajectory& tok, const SegmentedTrajectory& seg) {
  tok.task_id = seg.source.task_id;
  for (std::size_t t = 0; t < tok.size(); ++t) {
    const CharRange& range = tok.offsets[t];
    tok.labels[t] = TokenLabel::None;
    for (const Span& span : seg.spans) {
      if (range.begin >= span.end) continue;
      if (range.end <= span.begin) break;  // spans ordered
      if (range.begin >= span.begin && range.end <= span.end) {
        tok.labels[t] = span.label == SpanLabel::Reason ? TokenLabel::Reason : TokenLabel::Action;
      } else {
        throw SadError(ErrorKind::BoundaryStraddle,
                       "token " + std::to_string(t) + " straddles a span boundary");
      }
      break;
    }
  }
}

}  // namespace sadkit
