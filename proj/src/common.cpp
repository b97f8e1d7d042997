#include "pgso/common.hpp"

#include <cstring>

namespace pgso {

const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::MalformedJson: return "MALFORMED_JSON";
    case ErrorCode::UnknownConceptRef: return "UNKNOWN_CONCEPT_REF";
    case ErrorCode::DuplicateName: return "DUPLICATE_NAME";
    case ErrorCode::CycleDetected: return "CYCLE_DETECTED";
    case ErrorCode::BadRelType: return "BAD_REL_TYPE";
    case ErrorCode::ConstraintViolation: return "CONSTRAINT_VIOLATION";
    case ErrorCode::RuleNotApplicable: return "RULE_NOT_APPLICABLE";
    case ErrorCode::SelfMerge: return "SELF_MERGE";
    case ErrorCode::NonConvergence: return "NON_CONVERGENCE";
    case ErrorCode::OrphanEdge: return "ORPHAN_EDGE";
    case ErrorCode::UnresolvableTemplate: return "UNRESOLVABLE_TEMPLATE";
    case ErrorCode::MismatchedOrigin: return "MISMATCHED_ORIGIN";
    case ErrorCode::ThetaOrder: return "THETA_ORDER";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::AnswerMismatch: return "ANSWER_MISMATCH";
  }
  return "UNKNOWN";
}

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("PGSO_LOG");
    if (env == nullptr) return LogLevel::Warn;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    return LogLevel::Warn;
  }();
  return level;
}

void log(LogLevel level, const std::string& message) {
  if (level < log_level()) return;
  const char* tag = level == LogLevel::Debug ? "debug"
                    : level == LogLevel::Info ? "info"
                                              : "warn";
  std::fprintf(stderr, "[pgso:%s] %s\n", tag, message.c_str());
}

}  // namespace pgso
