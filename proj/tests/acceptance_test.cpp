#include <iostream>

#include <gtest/gtest.h>

#include "qoptics/acceptance.hpp"

namespace qoptics::acceptance {
namespace {

void report(const CriterionResult& r) {
  std::cout << format_line(r) << std::endl;
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Acceptance, A1) { report(check_a1()); }
TEST(Acceptance, A2) { report(check_a2()); }
TEST(Acceptance, A3) { report(check_a3()); }
TEST(Acceptance, A4) { report(check_a4()); }
TEST(Acceptance, A5) { report(check_a5()); }
TEST(Acceptance, A6) { report(check_a6()); }
TEST(Acceptance, A7) { report(check_a7()); }
TEST(Acceptance, A8) { report(check_a8()); }

// The checks must notice a beam splitter with the wrong sign of i.
TEST(Acceptance, WrongBeamSplitterConventionIsCaught) {
  Options opt;
  opt.bs_convention = BsConvention::Conjugate;
  EXPECT_FALSE(check_a1(opt).passed);
}

}  // namespace
}  // namespace qoptics::acceptance
