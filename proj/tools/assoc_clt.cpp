#include <string>
#include <vector>

#include "assoc_clt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return assoc_clt::run_cli(args);
}
