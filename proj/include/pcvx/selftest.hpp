// Built-in invariant suite behind the `selftest` CLI subcommand: fast
// structural checks that exercise the moving parts end to end.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcvx {

struct SelftestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Runs every check, printing one line per check to `out`. Returns true iff
// all passed.
bool run_selftest(std::ostream& out);
std::vector<SelftestResult> run_selftest_checks();

}  // namespace pcvx
