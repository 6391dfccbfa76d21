#include "panoworld/service/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return panoworld::service::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
