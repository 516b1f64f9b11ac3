#include <string>
#include <vector>

#include "phlift/modelio.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return phlift::run_cli(args);
}
