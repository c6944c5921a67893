#include "sadkit/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sadkit {

PreprocessOutput preprocess_corpus(const std::vector<RawTrajectory>& corpus,
                                   const SegmentationRules& rules, MarkerPolicy policy,
                                   int min_count) {
  if (corpus.empty()) throw SadError(ErrorKind::EmptyCorpus, "preprocess of empty corpus");

  PreprocessOutput out;
  out.segmented.reserve(corpus.size());
  std::vector<std::string> documents;
  documents.reserve(corpus.size());
  for (const RawTrajectory& raw : corpus) {
    out.segmented.push_back(segment(raw, rules, policy));
    documents.push_back(out.segmented.back().document);
  }
  out.vocab = build_vocab(documents, min_count);

  out.tokenized.reserve(corpus.size());
  out.records.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const SegmentedTrajectory& seg = out.segmented[i];
    ValidationReport seg_report = round_trip_validate(seg);
    for (Finding& f : seg_report.findings) {
      f.message = seg.source.task_id + ": " + f.message;
    }
    out.report.merge(seg_report);

    TokenizedTrajectory tok = tokenize_with_offsets(seg.document, out.vocab);
    label_tokens(tok, seg);

    PreprocessedTrajectory rec;
    rec.task_id = seg.source.task_id;
    rec.token_ids = tok.token_ids;
    rec.masks = build_masks(tok);

    ValidationReport mask_report = validate_masks(rec.masks, tok);
    for (Finding& f : mask_report.findings) {
      f.message = seg.source.task_id + ": " + f.message;
    }
    out.report.merge(mask_report);

    out.tokenized.push_back(std::move(tok));
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SadError(ErrorKind::IoError, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a(buffer.str())));
  return hex;
}

}  // namespace sadkit
