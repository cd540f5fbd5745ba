#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace nlmp::cli {

// `key = value` lines, '#' comments, blank lines ignored
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Dispatch one subcommand:
//   eig | solve | scan-gamma | bubble-scan | level-check | window |
//   system-check | flow
// with arguments of the form `--config <file>`, `--key value`, `--out <path>`.
// Flags override file values.  Exit codes: 0 success, 2 invalid configuration,
// 3 solver non-convergence, 4 quadrature/asymptotics failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 17-significant-digit float formatting used in every artifact
std::string fmt17(double x);

}  // namespace nlmp::cli
