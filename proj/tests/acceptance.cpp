// Runs every acceptance suite in one process and prints a line per criterion.
// Criterion 11 additionally drives the CLI binary twice and compares outputs.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "mepf/checks.hpp"

#ifndef MEPF_CLI_PATH
#error "MEPF_CLI_PATH must name the mepf executable"
#endif

namespace {

namespace fs = std::filesystem;

int run_command(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// CLI half of criterion 11.
std::string cli_determinism(bool& passed) {
  const fs::path dir = fs::temp_directory_path() / "mepf-acceptance-cli";
  fs::create_directories(dir);
  const std::string cli = MEPF_CLI_PATH;
  const std::string common = " run --dist footnote2:16 --trials 30 --seed 77 --delta 0.1 --jobs 2 > /dev/null";
  const int first = run_command(cli + common + " --out " + (dir / "a.csv").string());
  const int second = run_command(cli + common + " --out " + (dir / "b.csv").string());
  const std::string a = slurp(dir / "a.csv");
  const bool identical = first == 0 && second == 0 && !a.empty() && a == slurp(dir / "b.csv");
  const int canary = run_command(cli + " check --only 0 > /dev/null");
  fs::remove_all(dir);
  passed = identical && canary == 2;
  return "cli csv identical " + std::to_string(identical) + ", cli check failure exit " + std::to_string(canary);
}

}  // namespace

int main() {
  mepf::CheckOptions options;
  std::vector<mepf::CheckResult> results;
  for (int id = 1; id <= mepf::kCheckCount; ++id) {
    mepf::CheckResult r = mepf::run_check(id, options);
    if (id == 11) {
      bool cli_ok = false;
      r.detail += "; " + cli_determinism(cli_ok);
      r.passed = r.passed && cli_ok;
    }
    std::cout << mepf::format_check_line(r) << std::endl;
    results.push_back(std::move(r));
  }
  int failed = 0;
  for (const mepf::CheckResult& r : results) failed += r.passed ? 0 : 1;
  std::cout << (mepf::kCheckCount - failed) << "/" << mepf::kCheckCount << " criteria passed\n";
  return mepf::exit_code_for(results);
}
