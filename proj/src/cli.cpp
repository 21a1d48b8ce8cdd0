#include "sigtraj/cli.hpp"

#include <cstdio>

namespace sigtraj {

int run_cli(int, char**) {
  std::fprintf(stderr, "not wired up yet\n");
  return 2;
}

}  // namespace sigtraj
