#include <string>
#include <vector>

#include "kermit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kermit::run_cli(args);
}
