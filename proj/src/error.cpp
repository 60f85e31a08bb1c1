#include "jtm/error.hpp"

namespace jtm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntax: return "SYNTAX";
    case ErrorCode::kShape: return "SHAPE";
    case ErrorCode::kNonFinite: return "NONFINITE";
    case ErrorCode::kTooShort: return "TOO_SHORT";
    case ErrorCode::kOutOfRange: return "OUT_OF_RANGE";
    case ErrorCode::kEmptyGrid: return "EMPTY_GRID";
    case ErrorCode::kShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::kIdMismatch: return "ID_MISMATCH";
    case ErrorCode::kInvalidScore: return "INVALID_SCORE";
    case ErrorCode::kDimMismatch: return "DIM_MISMATCH";
    case ErrorCode::kIo: return "IO";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

}  // namespace jtm
