#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fraclab {

enum class ErrorKind {
    invalid_parameter,
    invalid_order,
    invalid_point,
    insufficient_derivatives,
    invalid_phi,
    invalid_input,
    invalid_bundle,
    numeric_error,
    sampling_infeasible,
    admissibility_error,
    invalid_config,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace fraclab
