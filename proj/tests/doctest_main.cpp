#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "dcmicro/log.hpp"

int main(int argc, char** argv) {
  dcmicro::set_warnings_enabled(false);
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
