#include <doctest.h>

#include "phlift/rational.hpp"

using namespace phlift;

TEST_CASE("rational text round trip") {
  for (const char* s : {"0", "5", "-3", "2/3", "-1/6", "22/7"}) {
    auto r = rat_from_string(s);
    REQUIRE(r.has_value());
    CHECK(rat_to_string(*r) == s);
  }
}

TEST_CASE("rational parsing canonicalizes") {
  CHECK(rat_to_string(*rat_from_string("2/4")) == "1/2");
  CHECK(rat_to_string(*rat_from_string("-6/4")) == "-3/2");
  CHECK(rat_to_string(*rat_from_string("0/7")) == "0");
}

TEST_CASE("rational parsing rejects malformed input") {
  for (const char* s :
       {"", "1/0", "a", "1.5", "--2", "1/ 2", "1/", "/2", "1/2/3", "1e3", " 1", "+3"}) {
    CHECK_FALSE(rat_from_string(s).has_value());
  }
}

TEST_CASE("rational helpers") {
  CHECK(rat_to_double(Rat(1) / Rat(4)) == doctest::Approx(0.25));
  CHECK(rat_sign(Rat(-7)) == -1);
  CHECK(rat_sign(Rat(0)) == 0);
  CHECK(rat_sign(Rat(2) / Rat(9)) == 1);
}
