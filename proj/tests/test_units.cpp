#include <catch2/catch_amalgamated.hpp>

#include "kinetiq/units.hpp"

using namespace kinetiq;

TEST_CASE("flux quantum equals h over 2e to 9 significant digits") {
    const Units& u = Units::si();
    const double derived = u.h / (2.0 * u.e);
    REQUIRE(std::abs(u.Phi0 - derived) / derived < 5e-10);
}

TEST_CASE("conversion factors") {
    REQUIRE(Units::nH == 1e-9);
    REQUIRE(Units::fF == 1e-15);
    REQUIRE(Units::aF == 1e-18);
    REQUIRE(Units::GHz == 1e9);
    REQUIRE(40.0 * Units::nH == Catch::Approx(4.0e-8));
}
