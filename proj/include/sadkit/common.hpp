#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sadkit {

enum class ErrorKind {
  NoSupervisedSpans,
  ConflictingMatch,
  MalformedRecord,
  EmptyCorpus,
  BoundaryStraddle,
  IdOutOfRange,
  ShapeMismatch,
  NegativeWeight,
  NonFiniteLoss,
  VersionMismatch,
  CorruptFile,
  EmptySet,
  EmptyTeacherSpan,
  Unsolvable,
  IoError,
  BadConfig,
};

std::string_view to_string(ErrorKind kind);

class SadError : public std::runtime_error {
public:
  SadError(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

enum class Severity { Warning, Error };

struct Finding {
  std::string kind;
  std::string message;
  std::size_t index = 0;  // span/token/line index the finding refers to
  Severity severity = Severity::Error;
};

/// Accumulates invariant-check findings instead of throwing.
struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const {
    for (const auto& f : findings) {
      if (f.severity == Severity::Error) return false;
    }
    return true;
  }
  std::size_t error_count() const {
    std::size_t n = 0;
    for (const auto& f : findings) {
      if (f.severity == Severity::Error) ++n;
    }
    return n;
  }
  void add(std::string kind, std::string message, std::size_t index = 0,
           Severity severity = Severity::Error) {
    findings.push_back({std::move(kind), std::move(message), index, severity});
  }
  void merge(const ValidationReport& other) {
    findings.insert(findings.end(), other.findings.begin(), other.findings.end());
  }
};

// FNV-1a, used for corpus hashes in manifests and per-trajectory seed derivation.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Verbosity gated by the SADKIT_LOG environment variable (0 = silent).
int log_level();
void log_info(const std::string& message);
void log_debug(const std::string& message);

}  // namespace sadkit
