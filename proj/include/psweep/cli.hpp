#ifndef PSWEEP_CLI_HPP
#define PSWEEP_CLI_HPP

#include <string>
#include <vector>

namespace psweep {

//! Dispatch the command line. Exit codes: 0 all checks pass, 2 assumption
//! violation, 3 solver failure, 4 acceptance-style check failure.
int run_command(const std::vector<std::string>& args);

}  // namespace psweep

#endif
