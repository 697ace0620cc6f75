#pragma once

#include <stdexcept>
#include <string>

namespace quansim {

enum class ErrorCode {
    InvalidArgument,
    Parse,
    Io,
    Shape,
    Bounds,
    Numeric,
    Placement,
    Degenerate,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(ErrorCode::Parse, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(ErrorCode::Shape, what) {}
};

class BoundsError : public Error {
public:
    explicit BoundsError(const std::string& what) : Error(ErrorCode::Bounds, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorCode::Numeric, what) {}
};

class PlacementError : public Error {
public:
    explicit PlacementError(const std::string& what) : Error(ErrorCode::Placement, what) {}
};

class DegenerateInputError : public Error {
public:
    explicit DegenerateInputError(const std::string& what) : Error(ErrorCode::Degenerate, what) {}
};

class InvalidArgumentError : public Error {
public:
    explicit InvalidArgumentError(const std::string& what) : Error(ErrorCode::InvalidArgument, what) {}
};

}  // namespace quansim
