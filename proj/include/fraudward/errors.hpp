#pragma once

#include <stdexcept>
#include <string>

namespace fraudward {

enum class ErrorCode {
    MissingColumn,
    UnknownCategory,
    NonNumericCell,
    BadLabel,
    TooFewRows,
    IoFailure,
    EmptyNode,
    EmptyTrainingSet,
    SingleClassTraining,
    WidthMismatch,
    DegenerateInput,
    SingleClassEval,
    VersionMismatch,
    CorruptModel,
    EmptyInput,
    InvalidConfig,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace fraudward
