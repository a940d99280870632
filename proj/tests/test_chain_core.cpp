#include "doctest.h"

TEST_CASE("placeholder_chain_core") { CHECK(true); }
