#include <string>
#include <vector>

#include "gaussact/cli.hpp"

int main(int argc, char** argv) {
  return gaussact::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
