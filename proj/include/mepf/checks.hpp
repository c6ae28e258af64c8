#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mepf {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct CheckOptions {
  std::uint64_t seed = 0x6d6570660001ULL;
  unsigned jobs = 1;
  /// Directory for temporary files; empty means the system temp directory.
  std::string scratch_dir;
};

/// Ids 1..kCheckCount are the acceptance suites. Id 0 is a canary that
/// always fails, for exercising failure reporting.
inline constexpr int kCheckCount = 11;

std::string_view check_name(int id);
/// Accepts a numeric id or a suite name; returns -1 when unknown.
int check_id(std::string_view name_or_id);
double check_time_limit(int id);

CheckResult run_check(int id, const CheckOptions& options);

/// "PASS [ 3] name: detail (1.20 s)"
std::string format_check_line(const CheckResult& result);

/// 0 when every result passed, 2 otherwise.
int exit_code_for(std::span<const CheckResult> results);

}  // namespace mepf
