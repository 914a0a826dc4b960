#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nhdirac {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed expression text. offset is the byte position where parsing stopped.
struct syntax_error : error {
  syntax_error(std::size_t offset, std::string expected)
      : error("syntax error at offset " + std::to_string(offset) + ": expected " + expected),
        offset(offset),
        expected(std::move(expected)) {}
  std::size_t offset;
  std::string expected;
};

// Unbound parameter, domain violation or non-finite result while evaluating an expression.
struct evaluation_error : error {
  using error::error;
};

// Invalid metric model or a sample that leaves the metric's domain.
struct metric_error : error {
  explicit metric_error(const std::string& what, long site = -1) : error(what), site(site) {}
  long site;
};

// Invalid run configuration (CLI / config file).
struct config_error : error {
  using error::error;
};

// Eigensolver non-convergence, overflow during propagation and similar.
struct numerical_error : error {
  using error::error;
};

}  // namespace nhdirac
