#include <doctest.h>

#include "property_suite.hpp"

namespace {

constexpr int kSeeds = 100;

void check(const props::Outcome& o) {
  INFO(o.name << ": worst error / tolerance = " << o.worst);
  CHECK(o.instances >= kSeeds);
  CHECK(o.worst <= 1.0);
}

}  // namespace

TEST_CASE("projection properties") { check(props::projection_suite(kSeeds)); }
TEST_CASE("coupling identity") { check(props::coupling_suite(kSeeds)); }
TEST_CASE("chart scale invariance") { check(props::scale_suite(kSeeds)); }
TEST_CASE("Wronskian conservation") { check(props::wronskian_suite(kSeeds)); }
TEST_CASE("resolvent symmetry") { check(props::symmetry_suite(kSeeds)); }
TEST_CASE("resolvent differences have rank at most 2|E| and solve the homogeneous equation") {
  check(props::rank_suite(kSeeds));
}
