#include "adboin/errors.hpp"

namespace adboin {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::Configuration: return "configuration";
        case ErrorCode::StateViolation: return "state_violation";
        case ErrorCode::OutOfOrder: return "out_of_order";
        case ErrorCode::Schema: return "schema";
    }
    return "unknown";
}

} // namespace adboin
