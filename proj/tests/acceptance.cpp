// Runs every criterion at full scale, then checks that selftest is
// reproducible and fast. Exit status is nonzero if any line is FAIL.
#include <chrono>
#include <iostream>
#include <sstream>

#include "igauge/checks.hpp"
#include "igauge/cli.hpp"

int main() {
  using namespace igauge;
  using clock = std::chrono::steady_clock;
  int failures = run_checks(SuiteScale::full(), Faults{}, std::cout);

  std::string outputs[2];
  double seconds[2];
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    std::ostringstream out, err;
    const auto t0 = clock::now();
    codes[k] = run_command({"selftest"}, out, err);
    seconds[k] = std::chrono::duration<double>(clock::now() - t0).count();
    outputs[k] = out.str();
  }
  const bool identical = outputs[0] == outputs[1];
  const bool fast = seconds[0] < 120 && seconds[1] < 120;
  const bool pass = identical && fast && codes[0] == 0 && codes[1] == 0;
  std::cout << "criterion_10=" << (pass ? "PASS" : "FAIL") << " selftest_reproducible identical=" << identical
            << " exit_codes=" << codes[0] << ',' << codes[1] << " seconds=" << detail::num(seconds[0]) << ','
            << detail::num(seconds[1]) << '\n';
  if (!pass) ++failures;
  std::cout << "failures=" << failures << '\n';
  return failures == 0 ? 0 : 1;
}
