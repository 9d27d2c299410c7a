#include <doctest.h>

#include <stdexcept>
#include <cmath>

#include "nsim/fairshare.hpp"

using namespace nsim;

namespace {

Allocations halves() {
  Allocations a;
  a.shares = {{"a", 0.5}, {"b", 0.25}, {"c", 0.19}};
  return a;
}

}  // namespace

TEST_CASE("zero usage gives factor 1") {
  FairShareLedger l(halves());
  CHECK(l.fairshare_factor("a", 0) == 1.0);
  CHECK(compute_fairshare_factor("unknown", l, 1000) == 1.0);
}

TEST_CASE("usage equal to share gives exactly one half") {
  FairShareLedger l(halves());
  l.record_usage("a", 10, 100, 0);
  l.record_usage("b", 5, 100, 0);
  l.record_usage("c", 5, 100, 0);
  REQUIRE(l.usage_fraction("a", 10) == 0.5);
  CHECK(l.fairshare_factor("a", 10) == 0.5);
  // b used 0.25 of the total against share 0.25
  CHECK(l.fairshare_factor("b", 10) == 0.5);
}

TEST_CASE("factor follows 2^(-U/S)") {
  FairShareLedger l(halves());
  l.record_usage("a", 1, 300, 0);
  l.record_usage("b", 1, 100, 0);
  const double u = 300.0 / 400.0;
  CHECK(l.fairshare_factor("a", 5) == doctest::Approx(std::pow(2.0, -u / 0.5)).epsilon(1e-15));
  CHECK(l.fairshare_factor("a", 5) < l.fairshare_factor("b", 5));
}

TEST_CASE("records exactly one window old still count; one second more are evicted") {
  FairShareLedger l(halves());
  l.record_usage("a", 1, 100, 0);
  CHECK(l.usage("a", 7 * kDay) == 100);
  CHECK(l.usage("a", 7 * kDay + 1) == 0);
  CHECK(l.record_count() == 0);
  CHECK(l.fairshare_factor("a", 7 * kDay + 1) == 1.0);
}

TEST_CASE("record, advance eight days, usage excluded") {
  FairShareLedger l(halves());
  l.record_usage("b", 4, 3600, 100);
  CHECK(l.usage("b", 200) == 4 * 3600);
  CHECK(l.usage("b", 100 + 8 * kDay) == 0);
}

TEST_CASE("equal usage gives equal fractions") {
  FairShareLedger l(halves());
  l.record_usage("a", 2, 50, 0);
  l.record_usage("c", 2, 50, 0);
  CHECK(l.usage_fraction("a", 1) == l.usage_fraction("c", 1));
}

TEST_CASE("unknown groups share the default pool among active default groups") {
  FairShareLedger l(halves());
  CHECK(l.target_share("x", 0) == doctest::Approx(0.06));
  l.record_usage("x", 1, 10, 0);
  l.record_usage("y", 1, 10, 0);
  CHECK(l.target_share("x", 1) == doctest::Approx(0.03));
  CHECK(l.target_share("z", 1) == doctest::Approx(0.02));
  CHECK(l.target_share("a", 1) == 0.5);
}

TEST_CASE("nonpositive seconds are rejected") {
  FairShareLedger l(halves());
  CHECK_THROWS_AS(l.record_usage("a", 1, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(FairShareLedger(halves(), 0), std::invalid_argument);
}

TEST_CASE("out-of-order records keep the window exact") {
  FairShareLedger l(halves(), 100);
  l.record_usage("a", 1, 10, 50);
  l.record_usage("a", 1, 20, 10);
  CHECK(l.usage("a", 110) == 30);
  CHECK(l.usage("a", 111) == 10);
  CHECK(l.usage("a", 151) == 0);
}
