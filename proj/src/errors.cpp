#include "fraudward/errors.hpp"

namespace fraudward {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::UnknownCategory: return "UnknownCategory";
        case ErrorCode::NonNumericCell: return "NonNumericCell";
        case ErrorCode::BadLabel: return "BadLabel";
        case ErrorCode::TooFewRows: return "TooFewRows";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::EmptyNode: return "EmptyNode";
        case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
        case ErrorCode::SingleClassTraining: return "SingleClassTraining";
        case ErrorCode::WidthMismatch: return "WidthMismatch";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::SingleClassEval: return "SingleClassEval";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::CorruptModel: return "CorruptModel";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "UnknownError";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace fraudward
