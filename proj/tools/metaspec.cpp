#include <string>
#include <vector>

#include "metaspec/cli/commands.hpp"

int main(int argc, char** argv) {
  return metaspec::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
