#ifndef SQF_ERRORS_HPP
#define SQF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sqf {

enum class errc {
    zero_input,
    capacity_exceeded,
    excluded_m,
    not_squarefree,
    mixed_fields,
    internal_inconsistency,
    non_convergence,
    not_in_order,
    mixed_orders,
    not_above_prime,
    verification_failed,
    bad_shape,
    unsupported_index,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const { return code_; }

  private:
    errc code_;
};

} // namespace sqf

#endif
