#include "doctest.h"

TEST_CASE("placeholder_cli") { CHECK(true); }
