#include <gtest/gtest.h>

#include "properties.hpp"

using namespace coup::testing;

namespace {

void expect_holds(const PropertyOutcome& o) {
  EXPECT_EQ(o.failures, 0u) << o.summary();
  EXPECT_GE(o.cases, kPropertyCases) << o.summary();
  std::cout << "      " << o.summary() << "\n";
}

TEST(Property, UnifierValidity) { expect_holds(property_unifier_validity()); }
TEST(Property, FixbetaLaws) { expect_holds(property_fixbeta()); }
TEST(Property, FragmentMonotonicity) { expect_holds(property_fragment_monotonicity()); }
TEST(Property, SearchCertificatesPassTheKernel) { expect_holds(property_search_certificates()); }
TEST(Property, KernelAgreesWithOracle) { expect_holds(property_kernel_oracle()); }
TEST(Property, ParsePrintRoundTrip) { expect_holds(property_round_trip()); }

}  // namespace
