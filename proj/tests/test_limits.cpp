#include "doctest.h"

TEST_CASE("placeholder_limits") { CHECK(true); }
