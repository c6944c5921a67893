#pragma once

#include <string>
#include <vector>

#include "sadkit/common.hpp"
#include "sadkit/segmenter.hpp"
#include "sadkit/supervision.hpp"
#include "sadkit/tokenizer.hpp"

namespace sadkit {

struct PreprocessOutput {
  Vocab vocab;
  std::vector<SegmentedTrajectory> segmented;
  std::vector<TokenizedTrajectory> tokenized;
  std::vector<PreprocessedTrajectory> records;
  ValidationReport report;  // aggregated across trajectories
};

// segment -> build_vocab -> tokenize -> label -> masks for a raw corpus.
PreprocessOutput preprocess_corpus(const std::vector<RawTrajectory>& corpus,
                                   const SegmentationRules& rules,
                                   MarkerPolicy policy = MarkerPolicy::MarkersInSpan,
                                   int min_count = 1);

// FNV-1a of a file's bytes, hex-encoded; used in run manifests.
std::string file_hash_hex(const std::string& path);

}  // namespace sadkit
