#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "streamdelay/model.hpp"

using namespace streamdelay;

TEST_CASE("channel parameters reject degenerate p")
{
  CHECK_NOTHROW(ChannelParams(0.6, 1));
  CHECK_THROWS_AS(ChannelParams(0.0), std::domain_error);
  CHECK_THROWS_AS(ChannelParams(1.0), std::domain_error);
  CHECK_THROWS_AS(ChannelParams(-0.2), std::domain_error);
  CHECK_THROWS_AS(ChannelParams(std::nan("")), std::domain_error);
  CHECK(ChannelParams(0.6).max_exponent() == doctest::Approx(-std::log(0.4)).epsilon(1e-15));
}

TEST_CASE("scheme vector validation")
{
  CHECK_NOTHROW(SchemeVector({1, 0, 3, 0}));
  CHECK_THROWS_AS(SchemeVector({1, 0, 2, 0}), std::invalid_argument);
  CHECK_THROWS_AS(SchemeVector({2, -1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(SchemeVector(std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(SchemeVector({5}), std::invalid_argument);
}

TEST_CASE("scheme vector parsing and printing")
{
  const auto x = SchemeVector::parse("1,0,3,0");
  CHECK(x.d() == 4);
  CHECK(x.entries() == std::vector<int>{1, 0, 3, 0});
  CHECK(x.to_string() == "1,0,3,0");
  CHECK(x.label() == "[1 0 3 0]");
  CHECK(x.slot_levels() == std::vector<int>{1, 3, 3, 3});
  CHECK(SchemeVector::parse(" 2 , 0 ") == SchemeVector({2, 0}));
  CHECK_THROWS_AS(SchemeVector::parse("1,,1"), std::invalid_argument);
  CHECK_THROWS_AS(SchemeVector::parse("a,b"), std::invalid_argument);
  CHECK_THROWS_AS(SchemeVector::parse(""), std::invalid_argument);
  CHECK(SchemeVector::repetition(3) == SchemeVector({3, 0, 0}));
  CHECK(SchemeVector::one_per_level(3) == SchemeVector({1, 1, 1}));
}

TEST_CASE("erasure patterns")
{
  const auto e = ErasurePattern::parse("1011");
  CHECK(e.size() == 4);
  CHECK(e.received() == 3);
  CHECK(e[0]);
  CHECK_FALSE(e[1]);
  CHECK(e.mask() == 0b1101u);
  CHECK(ErasurePattern::from_mask(4, 0b1101u).mask() == e.mask());
  CHECK_THROWS_AS(ErasurePattern::parse("10x1"), std::invalid_argument);
}

TEST_CASE("tradeoff points must be finite and non-negative")
{
  CHECK_NOTHROW(TradeoffPoint::make(0.3, 0.2, "test"));
  CHECK_THROWS_AS(TradeoffPoint::make(-0.1, 0.2, "test"), std::domain_error);
  CHECK_THROWS_AS(TradeoffPoint::make(0.1, INFINITY, "test"), std::domain_error);
  const auto pt = TradeoffPoint::make(0.6, -std::log(0.4), "edge");
  CHECK(pt.within_capacity_box(0.6));
  CHECK_FALSE(TradeoffPoint::make(0.61, 0.1, "over").within_capacity_box(0.6));
}

TEST_CASE("mixture weights")
{
  const SchemeVector a({2, 0});
  const SchemeVector b({1, 1});
  CHECK_NOTHROW(MixtureSpec({a, b}, {0.5, 0.5}));
  CHECK_NOTHROW(MixtureSpec({a, b}, {0.1, 0.9}));
  CHECK_THROWS_AS(MixtureSpec({a, b}, {0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(MixtureSpec({a, b}, {-0.5, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(MixtureSpec({a}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(MixtureSpec({a, SchemeVector({3, 0, 0})}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(MixtureSpec({}, {}), std::invalid_argument);
}
