#include <catch2/catch_amalgamated.hpp>
#include "speclab/acceptance.hpp"
TEST_CASE("placeholder test_dynamics") { CHECK(true); }
