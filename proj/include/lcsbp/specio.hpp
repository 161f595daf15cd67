#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcsbp/mechanism.hpp"

namespace lcsbp {

/// Malformed or invalid spec document.
class SpecParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses {lambda, sigma, gamma, c, levy: {kind, params}}; unknown keys are errors.
MechanismSpec parse_spec(const std::string& text);
MechanismSpec load_spec(const std::string& path);

/// Canonical form: fixed key order, defaults written out, shortest round-trip numbers.
/// Throws std::invalid_argument for user_tail measures, which have no document form.
std::string dump_spec(const MechanismSpec& spec, int indent = 2);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);
/// Shortest representation that parses back to the same double; inf and nan spelled out.
std::string csv_number(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t width_;
};

}  // namespace lcsbp
