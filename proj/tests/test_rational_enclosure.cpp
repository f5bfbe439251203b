#include <gtest/gtest.h>

#include <atomic>
#include <set>

#include "oracles.hpp"
#include "ordcover/enclosure.hpp"
#include "ordcover/parallel.hpp"
#include "ordcover/random.hpp"
#include "ordcover/rational.hpp"

using namespace ordcover;

TEST(Rational, ParseAndPrint) {
  EXPECT_EQ(parse_rational("3/4"), make_rational(3, 4));
  EXPECT_EQ(parse_rational("-6/8"), make_rational(-3, 4));
  EXPECT_EQ(parse_rational("+5"), make_rational(5));
  EXPECT_EQ(parse_rational("0"), make_rational(0));
  EXPECT_EQ(to_string(make_rational(6, 8)), "3/4");
  EXPECT_EQ(to_string(make_rational(-4, 2)), "-2");
  EXPECT_EQ(parse_rational("123456789012345678901234567890/7"),
            Rational(Integer("123456789012345678901234567890"), Integer(7)));
}

TEST(Rational, ParseErrors) {
  for (const char* bad : {"", "/", "1/", "/2", "a/2", "1/0", "1.5", "1/2/3", "-", " 1"}) {
    EXPECT_THROW(parse_rational(bad), parse_error) << bad;
  }
  EXPECT_THROW(make_rational(1, 0), argument_error);
}

TEST(Rational, RoundTrip) {
  oracle::Gen gen(1);
  for (int i = 0; i < 500; ++i) {
    const Rational r = gen.rational(1000, -50, 50);
    EXPECT_EQ(parse_rational(to_string(r)), r);
  }
}

TEST(Rational, FloorAndFrac) {
  EXPECT_EQ(floor_int(make_rational(7, 2)), 3);
  EXPECT_EQ(floor_int(make_rational(-7, 2)), -4);
  EXPECT_EQ(floor_int(make_rational(-4)), -4);
  EXPECT_EQ(frac(make_rational(-1, 3)), make_rational(2, 3));
  oracle::Gen gen(2);
  for (int i = 0; i < 500; ++i) {
    const Rational r = gen.rational(97, -20, 20);
    const Rational f = frac(r);
    EXPECT_GE(f, 0);
    EXPECT_LT(f, 1);
    EXPECT_EQ(floor_rational(r) + f, r);
  }
}

TEST(Rational, DirectedRounding) {
  oracle::Gen gen(3);
  for (int i = 0; i < 500; ++i) {
    const Rational r = gen.rational(1000003, -10, 10);
    const double lo = to_double_down(r), hi = to_double_up(r);
    EXPECT_LE(Rational(lo), r);
    EXPECT_GE(Rational(hi), r);
    EXPECT_GT(Rational(std::nextafter(lo, HUGE_VAL)), r);
    EXPECT_LT(Rational(std::nextafter(hi, -HUGE_VAL)), r);
  }
  EXPECT_EQ(to_double_down(make_rational(1, 2)), 0.5);
  EXPECT_EQ(to_double_up(make_rational(1, 2)), 0.5);
  EXPECT_LT(to_double_down(make_rational(1, 3)), to_double_up(make_rational(1, 3)));
}

TEST(Rational, FromDouble) {
  EXPECT_EQ(from_double(0.375), make_rational(3, 8));
  EXPECT_THROW(from_double(HUGE_VAL), argument_error);
  EXPECT_THROW(from_double(std::nan("")), argument_error);
}

TEST(Rational, Bits) {
  EXPECT_EQ(denominator_bits(make_rational(1, 8)), 4u);
  EXPECT_EQ(denominator_bits(make_rational(5)), 1u);
  EXPECT_EQ(numerator_bits(make_rational(0)), 0u);
  EXPECT_EQ(numerator_bits(make_rational(-7, 3)), 3u);
}

TEST(Enclosure, Construction) {
  EXPECT_THROW(Enclosure(1.0, 0.0), argument_error);
  EXPECT_THROW(Enclosure(std::nan(""), 0.0), argument_error);
  EXPECT_THROW(Enclosure(make_rational(1), make_rational(0)), argument_error);
  const Enclosure e(make_rational(1, 3), make_rational(2, 3));
  EXPECT_TRUE(e.is_exact());
  EXPECT_LE(Rational(e.lo()), make_rational(1, 3));
  EXPECT_GE(Rational(e.hi()), make_rational(2, 3));
  EXPECT_EQ(*e.exact_width(), make_rational(1, 3));
  EXPECT_DOUBLE_EQ(e.mid(), 0.5);
  EXPECT_FALSE(Enclosure(0.0, 1.0).exact_width().has_value());
  EXPECT_TRUE(Enclosure::point(make_rational(2)).contains(2.0));
}

TEST(Enclosure, ExactComparisonsUseRationals) {
  const Enclosure e(make_rational(1, 3), make_rational(1, 2));
  EXPECT_TRUE(e.contains(make_rational(1, 3)));
  EXPECT_FALSE(e.contains(make_rational(1, 3) - make_rational(1, 1000000000)));
  // to_double_down(1/3) lies outside the exact interval.
  EXPECT_FALSE(e.contains(e.lo()));
  EXPECT_TRUE(e.strictly_above(0.0));
  EXPECT_FALSE(Enclosure(make_rational(0), make_rational(1)).strictly_above(0.0));
  EXPECT_TRUE(Enclosure(make_rational(0), make_rational(1)).at_least(0.0));
  EXPECT_TRUE(e.strictly_below(0.5000001));
  EXPECT_FALSE(e.strictly_below(0.5));
}

TEST(Enclosure, Arithmetic) {
  const Enclosure a(make_rational(1, 4), make_rational(1, 2));
  const Enclosure b(make_rational(-1, 3), make_rational(1, 6));
  const Enclosure s = a + b;
  EXPECT_EQ(s.exact_lo(), make_rational(-1, 12));
  EXPECT_EQ(s.exact_hi(), make_rational(2, 3));
  EXPECT_EQ((-b).exact_lo(), make_rational(-1, 6));
  EXPECT_EQ(b.abs().exact_lo(), 0);
  EXPECT_EQ(b.abs().exact_hi(), make_rational(1, 3));
  EXPECT_EQ(a.scaled(-2).exact_lo(), -1);
  EXPECT_EQ(a.scaled(-2).exact_hi(), make_rational(-1, 2));
  const Enclosure m = max(a, b);
  EXPECT_EQ(m.exact_lo(), make_rational(1, 4));
  EXPECT_EQ(m.exact_hi(), make_rational(1, 2));
  const Enclosure w = a.widened(0.125);
  EXPECT_FALSE(w.is_exact());
  EXPECT_LT(w.lo(), 0.125);
  EXPECT_GT(w.hi(), 0.625);
  EXPECT_TRUE(a.widened(0.0).is_exact());
}

TEST(Enclosure, FloatArithmeticIsOutward) {
  oracle::Gen gen(4);
  for (int i = 0; i < 500; ++i) {
    const double x0 = gen.real(-1, 1), y0 = gen.real(-1, 1);
    const Enclosure x(x0, x0 + gen.real(0, 1e-3)), y(y0, y0 + gen.real(0, 1e-3));
    const Enclosure s = x + y;
    EXPECT_LE(Rational(s.lo()), Rational(x.lo()) + Rational(y.lo()));
    EXPECT_GE(Rational(s.hi()), Rational(x.hi()) + Rational(y.hi()));
    const Enclosure t = x.scaled(3);
    EXPECT_LE(Rational(t.lo()), Rational(x.lo()) * 3);
    EXPECT_GE(Rational(t.hi()), Rational(x.hi()) * 3);
  }
}

TEST(Enclosure, Overlaps) {
  EXPECT_TRUE(Enclosure(0.0, 1.0).overlaps(Enclosure(1.0, 2.0)));
  EXPECT_FALSE(Enclosure(make_rational(0), make_rational(1, 3)).overlaps(Enclosure(make_rational(1, 2), make_rational(1))));
  EXPECT_EQ(Enclosure(make_rational(1, 3), make_rational(1, 2)).str(), "[1/3, 1/2]");
}

TEST(Verdict, States) {
  EXPECT_TRUE(from_bool(true, "x").is_yes());
  EXPECT_EQ(from_bool(true, "x").certificate, "x");
  EXPECT_TRUE(from_bool(false).is_no());
  EXPECT_TRUE(Verdict{}.is_unknown());
  EXPECT_STREQ(to_string(Truth::Unknown), "unknown");
}

TEST(Random, SplitStreamsAreDeterministicAndDistinct) {
  Rng a = split_rng(42, 7), b = split_rng(42, 7), c = split_rng(42, 8), d = split_rng(43, 7);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(split_rng(1, i)());
  EXPECT_EQ(firsts.size(), 1000u);
}

TEST(Random, Ranges) {
  Rng rng = split_rng(5, 0);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform(rng, -2, 3);
    EXPECT_GE(u, -2);
    EXPECT_LT(u, 3);
    const long long k = uniform_int(rng, -1, 1);
    EXPECT_GE(k, -1);
    EXPECT_LE(k, 1);
  }
}

TEST(Parallel, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for(0, [](std::size_t) { FAIL(); });
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                 if (i == 3) throw invariant_error("boom");
               }),
               invariant_error);
}

TEST(Parallel, ThreadCountHonoursCap) {
  ::setenv("ORDCOVER_THREADS", "1", 1);
  EXPECT_EQ(thread_count(), 1u);
  ::setenv("ORDCOVER_THREADS", "junk", 1);
  EXPECT_GE(thread_count(), 1u);
  ::unsetenv("ORDCOVER_THREADS");
}
