#include "sadkit/common.hpp"

#include <iostream>

namespace sadkit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoSupervisedSpans: return "NoSupervisedSpans";
    case ErrorKind::ConflictingMatch: return "ConflictingMatch";
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::BoundaryStraddle: return "BoundaryStraddle";
    case ErrorKind::IdOutOfRange: return "IdOutOfRange";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NegativeWeight: return "NegativeWeight";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::CorruptFile: return "CorruptFile";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::EmptyTeacherSpan: return "EmptyTeacherSpan";
    case ErrorKind::Unsolvable: return "Unsolvable";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::BadConfig: return "BadConfig";
  }
  return "UnknownError";
}

int log_level() {
  static int level = [] {
    const char* env = std::getenv("SADKIT_LOG");
    return env ? std::atoi(env) : 0;
  }();
  return level;
}

void log_info(const std::string& message) {
  if (log_level() >= 1) std::cerr << "[sadkit] " << message << "\n";
}

void log_debug(const std::string& message) {
  if (log_level() >= 2) std::cerr << "[sadkit:debug] " << message << "\n";
}

}  // namespace sadkit
