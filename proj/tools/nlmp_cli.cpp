#include <iostream>
#include <string>
#include <vector>

#include "nlmp/experiment.hpp"

namespace {

void usage(std::ostream& os) {
  os << "usage: nlmp <subcommand> [--config <file>] [--key value ...] [--out <path>]\n"
        "subcommands:\n"
        "  eig           first eigenvalue and the gamma threshold lambda1^{m+1}\n"
        "  solve         single mountain-pass solve (nehari | path | flow)\n"
        "  scan-gamma    threshold scan across a gamma grid (CSV)\n"
        "  bubble-scan   epsilon-asymptotics exponent fits (CSV)\n"
        "  level-check   ray-maximum level vs the compactness bound (CSV)\n"
        "  window        dimension-window arithmetic (CSV)\n"
        "  system-check  chain-system equivalence report (CSV)\n"
        "  flow          Cahn-Hilliard flow summary (JSON)\n";
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    usage(args.empty() ? std::cerr : std::cout);
    return args.empty() ? 2 : 0;
  }
  return nlmp::cli::run(args, std::cout, std::cerr);
}
