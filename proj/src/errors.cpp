#include "qmeas/errors.hpp"

namespace qmeas {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DegenerateInteraction: return "DegenerateInteraction";
        case ErrorKind::NegativeDeterminant: return "NegativeDeterminant";
        case ErrorKind::NonpositiveBalance: return "NonpositiveBalance";
        case ErrorKind::NonpositiveScale: return "NonpositiveScale";
        case ErrorKind::MismatchedGrids: return "MismatchedGrids";
        case ErrorKind::GridTooNarrow: return "GridTooNarrow";
        case ErrorKind::ResolutionExceeded: return "ResolutionExceeded";
        case ErrorKind::InvalidDistribution: return "InvalidDistribution";
        case ErrorKind::InvalidState: return "InvalidState";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace qmeas
