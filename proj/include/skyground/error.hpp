// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace skyground {

enum class Errc {
    InvalidArgument,
    NonPositiveDepth,
    RayMissesGround,
    DegenerateYaw,
    ParseError,
    DuplicateKey,
    EmptyTable,
    NotFound,
    SchemaError,
    LengthMismatch,
    PlanParseError,
    UnknownWorkflow,
    ToolError,
    BindingMissing,
    PlacementExhausted,
    IdMismatch,
    IoError,
};

std::string_view to_string(Errc code);

// Base of every domain failure raised by the library. The CLI maps any
// Error to exit status 1.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// Table/CSV parse failure; row is 1-based and counts the header line.
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& message);
    explicit ParseError(const std::string& message);

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_ = 0;
};

// Annotation schema violation, located by a JSON pointer ("/camera/agl_m").
class SchemaError : public Error {
public:
    SchemaError(std::string pointer, const std::string& message);

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

class ToolError : public Error {
public:
    ToolError(std::size_t step, const std::string& message);

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace skyground
