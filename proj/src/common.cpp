#include "common.hpp"

#include <cstdio>
#include <cstdlib>

namespace midas {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Config: return "Config";
        case ErrorCode::Io: return "Io";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::MisalignedStreams: return "MisalignedStreams";
        case ErrorCode::DegenerateThresholds: return "DegenerateThresholds";
        case ErrorCode::NoEvents: return "NoEvents";
        case ErrorCode::FitDiverged: return "FitDiverged";
        case ErrorCode::ZeroResponseSensor: return "ZeroResponseSensor";
        case ErrorCode::TrainingDiverged: return "TrainingDiverged";
        case ErrorCode::CorruptModel: return "CorruptModel";
        case ErrorCode::InsufficientReference: return "InsufficientReference";
        case ErrorCode::CannotBalance: return "CannotBalance";
        case ErrorCode::DegenerateReference: return "DegenerateReference";
        case ErrorCode::NoSignal: return "NoSignal";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

bool is_validation_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::Config:
        case ErrorCode::InsufficientData:
        case ErrorCode::MisalignedStreams:
        case ErrorCode::DegenerateThresholds:
        case ErrorCode::ZeroResponseSensor:
        case ErrorCode::InsufficientReference:
        case ErrorCode::CannotBalance:
        case ErrorCode::DegenerateReference:
        case ErrorCode::NoSignal:
            return true;
        default:
            return false;
    }
}

int log_level() {
    static int level = [] {
        const char* env = std::getenv("MIDAS_LOG");
        if (!env) return 0;
        return std::atoi(env);
    }();
    return level;
}

void log_warn(const std::string& msg) {
    std::fprintf(stderr, "[midas] warn: %s\n", msg.c_str());
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::fprintf(stderr, "[midas] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::fprintf(stderr, "[midas] debug: %s\n", msg.c_str());
}

}  // namespace midas
