#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace reeblab::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct SuiteConfig {
  std::uint64_t seed = 42;
  std::size_t qc_n = 512;       // grid for the full quasiconformal criterion
  std::size_t qc_n_trend = 256; // grid for the coefficient-convergence trend
  int torus_N = 4;
  int n_manufactured = 100;
  int threads = 1;
};

// Runs every acceptance criterion, in order, one result per criterion.
std::vector<CriterionResult> run_suite(const SuiteConfig& cfg);

// Canonical machine-readable report (sorted keys, stable float formatting,
// no timing or timestamps).
std::string canonical_report(const SuiteConfig& cfg, const std::vector<CriterionResult>& results);

// Small deterministic payload used by the byte-identity criterion and the
// CLI determinism check.
std::string determinism_payload(const SuiteConfig& cfg);

}  // namespace reeblab::acceptance
