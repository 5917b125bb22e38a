#pragma once

#include <stdexcept>
#include <string>

namespace hfdecon {

/// Raised when an estimator cannot be evaluated on the given data
/// (empty neighbourhoods, degenerate regression design, ...). Input
/// validation failures use std::invalid_argument instead.
class EstimationError : public std::runtime_error {
 public:
  explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hfdecon
