#include <doctest.h>

TEST_SUITE("commands") {}
