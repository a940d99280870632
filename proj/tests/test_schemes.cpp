#include "doctest.h"

TEST_CASE("placeholder_schemes") { CHECK(true); }
