// Subcommand front end: prepare | describe | train | eval | predict | synth.
// Every stage accepts --config (flat key=value file, flags win) and --seed,
// and writes a run.json metadata file (config echo, seed, input digests)
// into its output directory so a run can be reproduced bit for bit.
#pragma once

#include <string>
#include <vector>

namespace kermit {

// Runs one command line (arguments only, no program name). Returns the
// process exit code: 0 on success, 1 when a stage fails, 2 for unknown
// subcommands or malformed flags. --help prints usage and returns 0.
int run_cli(const std::vector<std::string>& args);

}  // namespace kermit
