// SPDX-License-Identifier: Apache-2.0
#include "skyground/error.hpp"

namespace skyground {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::NonPositiveDepth: return "NonPositiveDepth";
        case Errc::RayMissesGround: return "RayMissesGround";
        case Errc::DegenerateYaw: return "DegenerateYaw";
        case Errc::ParseError: return "ParseError";
        case Errc::DuplicateKey: return "DuplicateKey";
        case Errc::EmptyTable: return "EmptyTable";
        case Errc::NotFound: return "NotFound";
        case Errc::SchemaError: return "SchemaError";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::PlanParseError: return "PlanParseError";
        case Errc::UnknownWorkflow: return "UnknownWorkflow";
        case Errc::ToolError: return "ToolError";
        case Errc::BindingMissing: return "BindingMissing";
        case Errc::PlacementExhausted: return "PlacementExhausted";
        case Errc::IdMismatch: return "IdMismatch";
        case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ParseError::ParseError(std::size_t row, const std::string& message)
    : Error(Errc::ParseError, "row " + std::to_string(row) + ": " + message), row_(row) {}

ParseError::ParseError(const std::string& message) : Error(Errc::ParseError, message) {}

SchemaError::SchemaError(std::string pointer, const std::string& message)
    : Error(Errc::SchemaError, pointer + ": " + message), pointer_(std::move(pointer)) {}

ToolError::ToolError(std::size_t step, const std::string& message)
    : Error(Errc::ToolError, "step " + std::to_string(step) + ": " + message), step_(step) {}

}  // namespace skyground
