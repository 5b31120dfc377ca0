#include <iostream>
#include <string>

#include "robreg/acceptance.hpp"

// One PASS/FAIL line per criterion; nonzero exit if any fails.
int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
  bool ok = true;
  for (const auto& r : robreg::run_acceptance(quick, std::cout)) ok = ok && r.passed;
  return ok ? 0 : 1;
}
