#include <catch2/catch_amalgamated.hpp>
TEST_CASE("placeholder gridfile_cli") { CHECK(true); }
