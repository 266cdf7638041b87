#include <iostream>

#include "fastmesh_cli/app.hpp"

int main(int argc, char** argv) {
  return fastmesh::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
