#pragma once

#include <string>

#include "lcsbp/classify.hpp"
#include "lcsbp/duality.hpp"

namespace lcsbp {

/// Machine-readable forms of the classification and duality reports.
std::string classify_report_json(const BoundaryReport& r, int indent = 2);
std::string suite_report_json(const SuiteReport& r, int indent = 2);

/// Two-column human table: boundary, class.
std::string classify_table(const BoundaryReport& r);

}  // namespace lcsbp
