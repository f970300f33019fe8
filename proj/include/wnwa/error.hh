/* error.hh -- error kinds and exception type shared across the library */

#ifndef WNWA_ERROR_HH_
#define WNWA_ERROR_HH_

#include <stdexcept>
#include <string>

namespace wnwa {

enum class ErrorKind {
    LoopNotReturnMatched,
    InvalidMatching,
    InvalidAssignment,
    ParseError,
    AlphabetMismatch,
    NotDeterministic,
    UnsupportedBooleanConstruct,
    MonoidFlagMissing,
    FragmentViolation,
    NotWedgeRestricted,
    NotCommutativelyWedgeRestricted,
    NotRegularMonoid,
    ExistsOverForallSeries,
    NonPeriodicDetectionOverflow,
    UnsupportedMonoidEngine,
    NonBoundedWeights,
    UnsupportedSequence,
    TooManyRuns,
    GenerationExhausted,
    PartitionViolation,
    LimitExceeded,
    IoError,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::LoopNotReturnMatched: return "LoopNotReturnMatched";
        case ErrorKind::InvalidMatching: return "InvalidMatching";
        case ErrorKind::InvalidAssignment: return "InvalidAssignment";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::AlphabetMismatch: return "AlphabetMismatch";
        case ErrorKind::NotDeterministic: return "NotDeterministic";
        case ErrorKind::UnsupportedBooleanConstruct: return "UnsupportedBooleanConstruct";
        case ErrorKind::MonoidFlagMissing: return "MonoidFlagMissing";
        case ErrorKind::FragmentViolation: return "FragmentViolation";
        case ErrorKind::NotWedgeRestricted: return "NotWedgeRestricted";
        case ErrorKind::NotCommutativelyWedgeRestricted: return "NotCommutativelyWedgeRestricted";
        case ErrorKind::NotRegularMonoid: return "NotRegularMonoid";
        case ErrorKind::ExistsOverForallSeries: return "ExistsOverForallSeries";
        case ErrorKind::NonPeriodicDetectionOverflow: return "NonPeriodicDetectionOverflow";
        case ErrorKind::UnsupportedMonoidEngine: return "UnsupportedMonoidEngine";
        case ErrorKind::NonBoundedWeights: return "NonBoundedWeights";
        case ErrorKind::UnsupportedSequence: return "UnsupportedSequence";
        case ErrorKind::TooManyRuns: return "TooManyRuns";
        case ErrorKind::GenerationExhausted: return "GenerationExhausted";
        case ErrorKind::PartitionViolation: return "PartitionViolation";
        case ErrorKind::LimitExceeded: return "LimitExceeded";
        case ErrorKind::IoError: return "IoError";
    }
    return "UnknownError";
}

} // namespace wnwa

#endif // WNWA_ERROR_HH_
