#pragma once

#include <stdexcept>
#include <string>

namespace lpsketch {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct ZeroRhs : Error {
    ZeroRhs() : Error("right-hand side has zero norm") {}
};

struct ZeroColumn : Error {
    explicit ZeroColumn(long column_index)
        : Error("constraint matrix has a zero column at index " +
                std::to_string(column_index)),
          column(column_index) {}
    long column;
};

struct BadEpsilon : Error {
    using Error::Error;
};

struct BadSparsity : Error {
    using Error::Error;
};

struct NumericalFailure : Error {
    using Error::Error;
};

struct TooLarge : Error {
    using Error::Error;
};

struct NotInCone : Error {
    using Error::Error;
};

struct RankFailure : Error {
    using Error::Error;
};

struct NonAscii : Error {
    using Error::Error;
};

struct BadLength : Error {
    using Error::Error;
};

struct InfeasibleProjection : Error {
    using Error::Error;
};

struct DegenerateInstance : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace lpsketch
