#include <doctest.h>

TEST_SUITE("fock") {}
