#include <iostream>

#include "property_checks.hpp"

int main() {
  int failed = 0;
  for (auto& r : run_property_suite()) {
    std::cout << (r.ok ? "PASS " : "FAIL ") << r.name << ": " << r.detail << std::endl;
    failed += !r.ok;
  }
  return failed ? 1 : 0;
}
