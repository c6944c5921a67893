#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "sadkit/envkit.hpp"
#include "sadkit/pipeline.hpp"
#include "sadkit/segmenter.hpp"
#include "sadkit/tokenizer.hpp"

using namespace sadkit;

namespace {

RawTrajectory fridge_example() {
  RawTrajectory raw;
  raw.task_id = "fridge-0";
  raw.lines = {"Reasoning: I should find the fridge. It's likely in the kitchen.",
               "Action: goto kitchen"};
  return raw;
}

Vocab vocab_of(const std::string& doc) { return build_vocab({doc}, 1); }

}  // namespace

TEST_CASE("punctuation is detached and apostrophes group with their suffix") {
  const std::string line = "Reasoning: I should find the fridge.";
  std::vector<std::string> texts;
  for (const RawToken& t : lex(line)) texts.push_back(t.text);
  CHECK(texts == std::vector<std::string>{"Reasoning", ":", "I", "should", "find", "the",
                                          "fridge", "."});

  texts.clear();
  for (const RawToken& t : lex("It's likely")) texts.push_back(t.text);
  CHECK(texts == std::vector<std::string>{"It", "'s", "likely"});
}

TEST_CASE("fridge example tokenizes to 19 tokens") {
  const SegmentedTrajectory seg = segment(fridge_example(), SegmentationRules{});
  const Vocab vocab = vocab_of(seg.document);
  TokenizedTrajectory tok = tokenize_with_offsets(seg.document, vocab);
  CHECK(tok.size() == 19);
}

TEST_CASE("single token offsets") {
  const Vocab vocab = vocab_of("kitchen");
  const TokenizedTrajectory tok = tokenize_with_offsets("kitchen", vocab);
  REQUIRE(tok.size() == 1);
  CHECK(tok.offsets[0] == CharRange{0, 7});
}

TEST_CASE("marker strings map to their special ids") {
  const Vocab vocab = vocab_of("[REASON] hello [ACT] world");
  const TokenizedTrajectory tok = tokenize_with_offsets("[REASON] hello [ACT] world", vocab);
  REQUIRE(tok.size() == 4);
  CHECK(tok.token_ids[0] == Vocab::kReason);
  CHECK(tok.token_ids[2] == Vocab::kAct);
}

TEST_CASE("build_vocab respects min_count and is deterministic") {
  const Vocab v1 = build_vocab({"a a b"}, 1);
  CHECK(v1.lookup("a") != Vocab::kUnk);
  CHECK(v1.lookup("b") != Vocab::kUnk);

  const Vocab v2 = build_vocab({"a a b"}, 2);
  CHECK(v2.lookup("a") != Vocab::kUnk);
  CHECK(v2.lookup("b") == Vocab::kUnk);

  CHECK_THROWS_AS(build_vocab({}, 1), SadError);

  // Determinism over a generated corpus.
  const auto corpus = generate_corpus(200, 5, default_difficulty_mix());
  std::vector<std::string> docs;
  for (const auto& raw : corpus) docs.push_back(segment(raw, SegmentationRules{}).document);
  const Vocab a = build_vocab(docs, 1);
  const Vocab b = build_vocab(docs, 1);
  CHECK(a.id_to_token == b.id_to_token);
}

TEST_CASE("offset slices reproduce token text across a corpus") {
  const auto corpus = generate_corpus(100, 9, default_difficulty_mix());
  std::vector<std::string> docs;
  for (const auto& raw : corpus) docs.push_back(segment(raw, SegmentationRules{}).document);
  const Vocab vocab = build_vocab(docs, 1);
  for (const std::string& doc : docs) {
    const TokenizedTrajectory tok = tokenize_with_offsets(doc, vocab);
    for (std::size_t t = 0; t < tok.size(); ++t) {
      const std::string slice =
          doc.substr(tok.offsets[t].begin, tok.offsets[t].end - tok.offsets[t].begin);
      const int id = tok.token_ids[t];
      if (id != Vocab::kUnk) {
        CHECK(vocab.id_to_token[static_cast<std::size_t>(id)] == slice);
      }
      if (t > 0) CHECK(tok.offsets[t].begin >= tok.offsets[t - 1].end);
    }
  }
}

TEST_CASE("fridge labels: 15 reason then 4 action under MarkersInSpan") {
  const SegmentedTrajectory seg = segment(fridge_example(), SegmentationRules{});
  const Vocab vocab = vocab_of(seg.document);
  TokenizedTrajectory tok = tokenize_with_offsets(seg.document, vocab);
  label_tokens(tok, seg);
  REQUIRE(tok.size() == 19);
  for (std::size_t t = 0; t < 15; ++t) CHECK(tok.labels[t] == TokenLabel::Reason);
  for (std::size_t t = 15; t < 19; ++t) CHECK(tok.labels[t] == TokenLabel::Action);
}

TEST_CASE("MarkersUnsupervised leaves prefixes unlabeled") {
  const SegmentedTrajectory seg =
      segment(fridge_example(), SegmentationRules{}, MarkerPolicy::MarkersUnsupervised);
  const Vocab vocab = vocab_of(seg.document);
  TokenizedTrajectory tok = tokenize_with_offsets(seg.document, vocab);
  label_tokens(tok, seg);
  CHECK(tok.labels[0] == TokenLabel::None);   // "Reasoning"
  CHECK(tok.labels[1] == TokenLabel::None);   // ":"
  CHECK(tok.labels[2] == TokenLabel::Reason); // "I"
  CHECK(tok.labels[15] == TokenLabel::None);  // "Action"
  CHECK(tok.labels[17] == TokenLabel::Action);
}

TEST_CASE("all-action document labels every token Action") {
  RawTrajectory raw;
  raw.task_id = "act";
  raw.lines = {"Action: goto kitchen"};
  const SegmentedTrajectory seg = segment(raw, SegmentationRules{});
  const Vocab vocab = vocab_of(seg.document);
  TokenizedTrajectory tok = tokenize_with_offsets(seg.document, vocab);
  label_tokens(tok, seg);
  for (std::size_t t = 0; t < tok.size(); ++t) CHECK(tok.labels[t] == TokenLabel::Action);
}

TEST_CASE("label counts match a per-span token-count oracle on a corpus") {
  const auto corpus = generate_corpus(200, 13, default_difficulty_mix());
  const auto pre = preprocess_corpus(corpus, SegmentationRules{});
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const SegmentedTrajectory& seg = pre.segmented[i];
    const TokenizedTrajectory& tok = pre.tokenized[i];
    // Oracle: lex each span's slice independently and count.
    std::size_t reason = 0, action = 0;
    for (const Span& span : seg.spans) {
      const std::size_t n = lex(span.text).size();
      if (span.label == SpanLabel::Reason) {
        reason += n;
      } else {
        action += n;
      }
    }
    std::size_t got_r = 0, got_a = 0;
    for (TokenLabel l : tok.labels) {
      if (l == TokenLabel::Reason) ++got_r;
      if (l == TokenLabel::Action) ++got_a;
    }
    CHECK(got_r == reason);
    CHECK(got_a == action);
  }
}

TEST_CASE("labeling is idempotent") {
  const SegmentedTrajectory seg = segment(fridge_example(), SegmentationRules{});
  const Vocab vocab = vocab_of(seg.document);
  TokenizedTrajectory tok = tokenize_with_offsets(seg.document, vocab);
  label_tokens(tok, seg);
  const auto first = tok.labels;
  label_tokens(tok, seg);
  CHECK(tok.labels == first);
}

TEST_CASE("vocab json round trip") {
  const Vocab vocab = vocab_of("some words for a vocab");
  const std::string path = "/tmp/sadkit_test_vocab.json";
  vocab.save(path);
  const Vocab loaded = Vocab::load(path);
  CHECK(loaded.id_to_token == vocab.id_to_token);
  std::remove(path.c_str());
}
