#include "fraclab/errors.hpp"

namespace fraclab {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_parameter: return "invalid-parameter";
        case ErrorKind::invalid_order: return "invalid-order";
        case ErrorKind::invalid_point: return "invalid-point";
        case ErrorKind::insufficient_derivatives: return "insufficient-derivatives";
        case ErrorKind::invalid_phi: return "invalid-phi";
        case ErrorKind::invalid_input: return "invalid-input";
        case ErrorKind::invalid_bundle: return "invalid-bundle";
        case ErrorKind::numeric_error: return "numeric-error";
        case ErrorKind::sampling_infeasible: return "sampling-infeasible";
        case ErrorKind::admissibility_error: return "admissibility-error";
        case ErrorKind::invalid_config: return "invalid-config";
    }
    return "error";
}

}  // namespace fraclab
