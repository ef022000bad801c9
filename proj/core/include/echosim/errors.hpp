#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace echosim {

// Invalid parameters or malformed configuration. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// The Euler-angle factorization left its valid chart: |2 chi2 Omega| reached
// pi/2 - 0.1, where tan/sec blow up. The CLI maps this to exit code 3.
struct SingularityError : std::runtime_error {
  SingularityError(const std::string& msg, std::size_t step,
                   std::optional<std::size_t> repeat = std::nullopt)
      : std::runtime_error(msg), step(step), repeat(repeat) {}

  std::size_t step = 0;
  std::optional<std::size_t> repeat;
};

}  // namespace echosim
