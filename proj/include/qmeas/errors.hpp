#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmeas {

enum class ErrorKind {
    DegenerateInteraction,
    NegativeDeterminant,
    NonpositiveBalance,
    NonpositiveScale,
    MismatchedGrids,
    GridTooNarrow,
    ResolutionExceeded,
    InvalidDistribution,
    InvalidState,
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it onto an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace qmeas
