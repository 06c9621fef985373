#pragma once

#include <stdexcept>
#include <string>

namespace pdikit {

enum class ErrorCode {
    DimensionMismatch,
    IndexOutOfRange,
    NotUnitNorm,
    NotCnd,
    NotPdi,
    ConstraintViolation,
    ShapeMismatch,
    Unsupported,
    InvalidSpec,
    MissingColumn,
    NonNumericCell,
    EmptyFile,
    IoError,
    ParseError,
    SampleTooSmall,
    DegenerateWitness,
    GridTooCoarse,
    UsageError,
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::NotUnitNorm: return "NotUnitNorm";
        case ErrorCode::NotCnd: return "NotCnd";
        case ErrorCode::NotPdi: return "NotPdi";
        case ErrorCode::ConstraintViolation: return "ConstraintViolation";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::Unsupported: return "Unsupported";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::NonNumericCell: return "NonNumericCell";
        case ErrorCode::EmptyFile: return "EmptyFile";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::SampleTooSmall: return "SampleTooSmall";
        case ErrorCode::DegenerateWitness: return "DegenerateWitness";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::UsageError: return "UsageError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

}  // namespace pdikit
