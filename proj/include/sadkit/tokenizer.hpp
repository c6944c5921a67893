#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "sadkit/common.hpp"
#include "sadkit/segmenter.hpp"

namespace sadkit {

enum class TokenLabel { None, Reason, Action };

struct Vocab {
  // Specials occupy the lowest ids.
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kUnk = 2;
  static constexpr int kReason = 3;  // "[REASON]"
  static constexpr int kAct = 4;     // "[ACT]"
  static constexpr int kNumSpecials = 5;

  std::vector<std::string> id_to_token;
  std::unordered_map<std::string, int> token_to_id;

  int size() const { return static_cast<int>(id_to_token.size()); }
  int lookup(const std::string& token) const {
    auto it = token_to_id.find(token);
    return it == token_to_id.end() ? kUnk : it->second;
  }

  void save(const std::string& path) const;
  static Vocab load(const std::string& path);
};

struct CharRange {
  std::size_t begin = 0;
  std::size_t end = 0;  // half-open
  bool operator==(const CharRange&) const = default;
};

struct TokenizedTrajectory {
  std::string task_id;
  std::vector<int> token_ids;
  std::vector<CharRange> offsets;
  std::vector<TokenLabel> labels;  // set by label_tokens

  std::size_t size() const { return token_ids.size(); }
};

// Raw lexer shared by build_vocab and tokenize_with_offsets: whitespace split
// with punctuation detached ("fridge." -> "fridge", "."), apostrophe groups
// with its suffix ("It's" -> "It", "'s"), marker strings kept whole.
struct RawToken {
  std::string text;
  CharRange range;
};
std::vector<RawToken> lex(const std::string& doc);

Vocab build_vocab(const std::vector<std::string>& corpus, int min_count);

TokenizedTrajectory tokenize_with_offsets(const std::string& doc, const Vocab& vocab);

// Assigns labels[t] from span containment; throws BoundaryStraddle if a token
// crosses a span edge (cannot happen for documents lexed by this tokenizer).
void label_tokens(TokenizedTrajectory& tok, const SegmentedTrajectory& seg);

}  // namespace sadkit
