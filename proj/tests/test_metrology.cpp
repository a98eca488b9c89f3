#include <doctest.h>

TEST_SUITE("metrology") {}
