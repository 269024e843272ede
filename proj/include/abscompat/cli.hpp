#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abscompat/matrix_json.hpp"

namespace abscompat::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kNotCompatible = 2,
  kNotStrict = 3,
  kStructural = 4,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Entry point shared by the executable and the in-process tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct PropertyResult {
  std::string name;
  double bound = 0.0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  double worst_residual = 0.0;
  std::optional<std::uint64_t> first_failure_seed;
};

struct FuzzFailure {
  std::string property;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string message;
  Json instance;
};

struct FuzzReport {
  std::string suite;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<PropertyResult> properties;
  std::vector<FuzzFailure> failures;

  bool all_passed() const;
};

const std::vector<std::string>& suite_names();

/// Trial i uses trial_seed(seed, i). Throws UnknownSuite.
FuzzReport run_fuzz_suite(std::string_view suite, std::size_t trials, std::uint64_t seed,
                          const Tolerances& tol = kDefaultTolerances);

Json fuzz_report_to_json(const FuzzReport& report);

}  // namespace abscompat::cli
