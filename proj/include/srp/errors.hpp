#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace srp {

enum class ErrorCode {
  invalid_instance,
  empty_sensor_list,
  pivot_too_small,
  not_spanning,
  ill_conditioned,
  series_undetermined,
  negative_discriminant,
  not_converging,
  mixed,
  missing_arrival_time,
  no_solution,
  not_on_sphere,
  empty_delta,
  empty_intersection,
  no_root_in_delta,
  unknown_scenario,
};

std::string_view to_string(ErrorCode code);

/// Failure raised by the solver pipeline. `indices` carries the offending
/// sensor (or pivot) indices when the failure is attributable to them.
class SrpError : public std::runtime_error {
 public:
  SrpError(ErrorCode code, const std::string& what, std::vector<long> indices = {})
      : std::runtime_error(what), code_(code), indices_(std::move(indices)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<long>& indices() const noexcept { return indices_; }

 private:
  ErrorCode code_;
  std::vector<long> indices_;
};

}  // namespace srp
