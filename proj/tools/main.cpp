#include <string>
#include <vector>

#include "depthkit/cli.hpp"

int main(int argc, char** argv) {
  return depthkit::cli::run_command(
      std::vector<std::string>(argv + 1, argv + argc));
}
