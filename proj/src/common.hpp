#pragma once

#include <stdexcept>
#include <string>

namespace midas {

enum class ErrorCode {
    InvalidArgument,
    Config,
    Io,
    InsufficientData,
    MisalignedStreams,
    DegenerateThresholds,
    NoEvents,
    FitDiverged,
    ZeroResponseSensor,
    TrainingDiverged,
    CorruptModel,
    InsufficientReference,
    CannotBalance,
    DegenerateReference,
    NoSignal,
    Internal,
};

const char* error_code_name(ErrorCode code);

/// Input/validation errors exit a CLI run with code 1, runtime failures with 2.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Log level comes from the MIDAS_LOG environment variable (0=warn, 1=info, 2=debug).
int log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);
void log_warn(const std::string& msg);

}  // namespace midas
