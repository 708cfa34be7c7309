#include "vora/error.hpp"

namespace vora {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::DuplicateWavelength: return "DuplicateWavelength";
    case ErrorCode::UnsortedWavelength: return "UnsortedWavelength";
    case ErrorCode::InsufficientCoverage: return "InsufficientCoverage";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonPositiveFilter: return "NonPositiveFilter";
    case ErrorCode::OutOfBox: return "OutOfBox";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::BadBasisSpec: return "BadBasisSpec";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NoAscent: return "NoAscent";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace vora
