#include "sml/cli.hpp"

int main(int argc, char** argv) {
  return sml::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
