#include "netpass/errors.hpp"

namespace netpass {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSelfLoop: return "SelfLoop";
    case ErrorCode::kDuplicateEdge: return "DuplicateEdge";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kGraphDisconnected: return "GraphDisconnected";
    case ErrorCode::kNonConvexDual: return "NonConvexDual";
    case ErrorCode::kNonConvexProx: return "NonConvexProx";
    case ErrorCode::kNotPassivizable: return "NotPassivizable";
    case ErrorCode::kCertificateFailure: return "CertificateFailure";
    case ErrorCode::kEmptySelfRegulatingSet: return "EmptySelfRegulatingSet";
    case ErrorCode::kNumericalBlowup: return "NumericalBlowup";
    case ErrorCode::kDimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace netpass
