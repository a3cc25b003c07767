#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace distreg {

/// Bad input: malformed arguments, violated dataset invariants, unusable config.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Dataset file could not be parsed; `line` is 1-based (0 when not line-specific).
struct ParseError : std::runtime_error {
    ParseError(std::string msg, std::size_t line_no = 0)
        : std::runtime_error(std::move(msg)), line(line_no) {}
    std::size_t line;
};

/// A Gram matrix has no positive-definite Cholesky factorization.
/// Signals rank deficiency: fewer distinct support points than basis elements.
struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The symmetric eigensolver did not converge.
struct EigenFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A bag has fewer distinct x-values than the x basis degree.
struct InsufficientRank : std::runtime_error {
    InsufficientRank(std::string bag, std::string msg)
        : std::runtime_error(std::move(msg)), bag_id(std::move(bag)) {}
    std::string bag_id;
};

/// The weighted conditional Gram over outcomes is not positive definite
/// (all weight collapsed onto fewer than d_y distinct outcomes).
struct SingularConditionalGram : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace distreg
