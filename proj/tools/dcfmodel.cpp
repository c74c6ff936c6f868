#include "dcf/cli.hpp"

#include <iostream>

int
main(int argc, char **argv)
{
  return dcf::cli::run({argv, argv + argc}, std::cout, std::cerr);
}
