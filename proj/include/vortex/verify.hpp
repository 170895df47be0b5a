#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vortex {

struct CriterionResult {
  int id = 0;
  std::string name;
  double measured = 0.0;
  std::string comparison;  // "<=" or ">="
  double tolerance = 0.0;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;
};

struct VerifyOptions {
  // Forces the series truncation in the series/sum criterion; nullopt keeps
  // the per-point default.
  std::optional<int> max_lattice_index;
  int threads = 0;
};

struct VerifyReport {
  std::vector<CriterionResult> results;
  bool all_passed() const;
};

/// Runs every acceptance criterion. Failures are report content, never exceptions.
VerifyReport run_acceptance(const VerifyOptions& options = {});

/// One line per criterion followed by a JSON summary block.
void write_report(std::ostream& out, const VerifyReport& report);

}  // namespace vortex
