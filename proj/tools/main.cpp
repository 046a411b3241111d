#include <vector>

#include "psweep/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return psweep::run_command(args);
}
