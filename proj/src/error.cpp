#include "decolab/error.hpp"

namespace decolab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::grid_mismatch: return "grid_mismatch";
    case ErrorCode::degenerate_bath: return "degenerate_bath";
    case ErrorCode::dimension_cap: return "dimension_cap";
    case ErrorCode::range: return "range";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::resolution: return "resolution";
    case ErrorCode::integration: return "integration";
    case ErrorCode::step_size: return "step_size";
    case ErrorCode::reference_convergence: return "reference_convergence";
    case ErrorCode::undefined_dissipation: return "undefined_dissipation";
  }
  return "unknown";
}

}  // namespace decolab
