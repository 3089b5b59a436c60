#include "gerbeflow/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return gerbeflow::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
