#include <doctest.h>

#include <cmath>

#include "binseq/errors.hpp"
#include "binseq/problem.hpp"
#include "support.hpp"

using namespace binseq;

namespace {

DesignProblem make(int n, BandSpec m, BandSpec i, double alpha = 1.0) {
  DesignProblem p;
  p.n = n;
  p.message = std::move(m);
  p.interferer = std::move(i);
  p.alpha = alpha;
  return p;
}

BandSpec run(int first, int last) {
  std::vector<int> v;
  for (int k = first; k <= last; ++k) v.push_back(k);
  return BandSpec(v);
}

}  // namespace

TEST_CASE("validate_problem accepts the reference 128-point bands") {
  std::vector<int> m, i;
  for (int k = 25; k <= 30; ++k) m.push_back(k);
  for (int k = 40; k <= 45; ++k) m.push_back(k);
  for (int k = 10; k <= 15; ++k) i.push_back(k);
  for (int k = 50; k <= 55; ++k) i.push_back(k);
  const DesignProblem p = make(128, BandSpec(m), BandSpec(i), 5.0);
  CHECK_NOTHROW(validate_problem(p));
  CHECK(&validate_problem(p) == &p);
}

TEST_CASE("validate_problem rejects malformed problems") {
  CHECK_THROWS_AS(validate_problem(make(8, {1}, {1})), OverlapError);
  CHECK_THROWS_AS(validate_problem(make(8, {9}, {})), IndexError);
  CHECK_THROWS_AS(validate_problem(make(8, {}, {2})), EmptyMessageError);
  CHECK_THROWS_AS(BandSpec({1, 1}), IndexError);
  CHECK_THROWS_AS(BandSpec({-1}), IndexError);
}

TEST_CASE("BandSpec sorts and contiguous runs") {
  const BandSpec b{5, 1, 3};
  CHECK(b.indices() == std::vector<int>{1, 3, 5});
  CHECK(b.contains(3));
  CHECK_FALSE(b.contains(2));
  CHECK(BandSpec::contiguous(4, 3) == BandSpec{4, 5, 6});
}

TEST_CASE("BinarySequence construction and masks") {
  CHECK_THROWS_AS(BinarySequence({1, 0, -1}), std::invalid_argument);
  const BinarySequence s = BinarySequence::from_mask(0b0110, 4);
  CHECK(s == BinarySequence{1, -1, -1, 1});
  CHECK(s.negated() == BinarySequence{-1, 1, 1, -1});
  const std::vector<double> v{0.0, -0.5, 2.0};
  CHECK(BinarySequence::sign_of(v) == BinarySequence{1, -1, 1});
  CHECK(BinarySequence{-1, 1} < BinarySequence{1, -1});
}

TEST_CASE("message power on the DC bin") {
  const DesignProblem p = make(4, {0}, {});
  CHECK(message_power(p, BinarySequence{1, 1, 1, 1}) == doctest::Approx(4.0));
  CHECK(message_power(p, BinarySequence{1, -1, 1, -1}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(message_power(p, BinarySequence{1, 1}), LengthMismatchError);
}

TEST_CASE("message power maximum over all length-8 sequences") {
  const DesignProblem p = make(8, {1, 7}, {}, 8.0);
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < 256; ++mask) {
    best = std::max(best, message_power(p, BinarySequence::from_mask(mask, 8)));
  }
  const testing::BruteBest ref = testing::brute_force(p, 8.0);
  CHECK(best == doctest::Approx(ref.power).epsilon(1e-12));
}

TEST_CASE("interferer power") {
  CHECK(interferer_power(make(4, {1}, {}), BinarySequence{1, -1, 1, 1}) == 0.0);
  CHECK(interferer_power(make(4, {1}, {0}), BinarySequence{1, 1, 1, 1}) == doctest::Approx(4.0));
  const DesignProblem p = make(16, {1}, {3, 5});
  const BinarySequence ones = BinarySequence::ones(16);
  CHECK(interferer_power(p, ones) ==
        doctest::Approx(testing::naive_band_power(testing::to_doubles(ones), p.interferer)).epsilon(1e-12));
}

TEST_CASE("rejection ratio conventions") {
  const DesignProblem p = make(4, {0}, {2});
  CHECK(std::isinf(rejection_ratio(p, BinarySequence{1, 1, 1, 1})));
  CHECK(std::isinf(rejection_ratio(make(4, {0}, {}), BinarySequence{1, -1, 1, 1})));
  // Both bands nulled: nothing to reject with.
  CHECK(rejection_ratio(make(4, {0}, {2}), BinarySequence{1, 1, -1, -1}) == 0.0);
  CHECK(rejection_ratio_from(0.0, 0.0, false) == 0.0);
  CHECK(std::isinf(rejection_ratio_from(1.0, 0.0, false)));
  CHECK(rejection_ratio_from(1.0, 2.0, false) == 0.5);
}

TEST_CASE("rejection ratio optimum at n = 16 matches brute force") {
  DesignProblem p = make(16, {2, 3}, {6, 7}, 16.0);
  double best = -1.0;
  for (std::uint64_t mask = 0; mask < (1U << 16); ++mask) {
    best = std::max(best, rejection_ratio(p, BinarySequence::from_mask(mask, 16)));
  }
  const testing::BruteBest ref = testing::brute_force(p, 16.0);
  if (std::isinf(ref.rho)) {
    CHECK(std::isinf(best));
  } else {
    CHECK(best == doctest::Approx(ref.rho).epsilon(1e-9));
  }
}

TEST_CASE("reciprocal dynamic range") {
  CHECK(reciprocal_dynamic_range(make(8, {3}, {}), BinarySequence{1, 1, -1, 1, 1, 1, 1, 1}) ==
        doctest::Approx(1.0));
  CHECK(std::abs(reciprocal_dynamic_range(make(4, {0, 2}, {}), BinarySequence{1, 1, 1, 1})) <= 1e-12);
  CHECK(dynamic_range_from(0.0, 0.0) == 0.0);

  const DesignProblem p = make(16, {1, 2, 3}, {}, 16.0);
  double best = -1.0;
  for (std::uint64_t mask = 0; mask < (1U << 16); ++mask) {
    best = std::max(best, reciprocal_dynamic_range(p, BinarySequence::from_mask(mask, 16)));
  }
  CHECK(best == doctest::Approx(testing::brute_force(p, 16.0).chi).epsilon(1e-9));
}

TEST_CASE("score kinds parse and select") {
  CHECK(parse_score_kind("rho") == ScoreKind::RejectionRatio);
  CHECK(parse_score_kind("power") == ScoreKind::MessagePower);
  CHECK(parse_score_kind("chi") == ScoreKind::ReciprocalDynamicRange);
  CHECK(parse_score_kind(to_string(ScoreKind::RejectionRatio)) == ScoreKind::RejectionRatio);
  CHECK_THROWS(parse_score_kind("nope"));
  MetricBundle m;
  m.message_power = 3.0;
  m.rejection_ratio = 2.0;
  m.reciprocal_dynamic_range = 0.5;
  CHECK(score_of(m, ScoreKind::MessagePower) == 3.0);
  CHECK(score_of(m, ScoreKind::RejectionRatio) == 2.0);
  CHECK(score_of(m, ScoreKind::ReciprocalDynamicRange) == 0.5);
}

TEST_CASE("property: metrics agree with a naive DFT") {
  testing::Gen gen(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = gen.uniform_int(4, 24);
    const int km = gen.uniform_int(1, n / 3);
    const int ki = gen.uniform_int(0, n / 3);
    const DesignProblem p = gen.problem(n, km, ki, gen.uniform(0.0, 3.0));
    const BinarySequence s = gen.sequence(n);
    const MetricBundle m = evaluate_metrics(p, s);
    const testing::NaiveMetrics ref = testing::naive_metrics(p, testing::to_doubles(s));
    CHECK(m.message_power == doctest::Approx(ref.f).epsilon(1e-10));
    CHECK(m.interferer_power == doctest::Approx(ref.g).epsilon(1e-10));
    CHECK(m.feasible == ref.feasible);
    if (std::isinf(ref.rho)) {
      CHECK(std::isinf(m.rejection_ratio));
    } else {
      CHECK(m.rejection_ratio == doctest::Approx(ref.rho).epsilon(1e-8));
    }
    CHECK(m.reciprocal_dynamic_range == doctest::Approx(ref.chi).epsilon(1e-8));
  }
}

TEST_CASE("property: negation invariance") {
  testing::Gen gen(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = gen.uniform_int(2, 40);
    const DesignProblem p = gen.problem(n, gen.uniform_int(1, n / 2), gen.uniform_int(0, n / 2), 2.0);
    const BinarySequence s = gen.sequence(n);
    const MetricBundle a = evaluate_metrics(p, s);
    const MetricBundle b = evaluate_metrics(p, s.negated());
    CHECK(a.message_power == doctest::Approx(b.message_power).epsilon(1e-12));
    CHECK(a.interferer_power == doctest::Approx(b.interferer_power).epsilon(1e-12));
    CHECK(a.feasible == b.feasible);
    if (std::isinf(a.rejection_ratio)) {
      CHECK(std::isinf(b.rejection_ratio));
    } else {
      CHECK(a.rejection_ratio == doctest::Approx(b.rejection_ratio).epsilon(1e-9));
    }
    CHECK(a.reciprocal_dynamic_range == doctest::Approx(b.reciprocal_dynamic_range).epsilon(1e-9));
  }
}

TEST_CASE("property: Parseval bound on disjoint bands") {
  testing::Gen gen(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = gen.uniform_int(2, 40);
    const int km = gen.uniform_int(1, n - 1);
    const int ki = gen.uniform_int(0, n - km);
    const DesignProblem p = gen.problem(n, km, ki, 1.0);
    const BinarySequence s = gen.sequence(n);
    const double total = message_power(p, s) + interferer_power(p, s);
    CHECK(total <= n + 1e-9);
    if (km + ki == n) CHECK(total == doctest::Approx(static_cast<double>(n)).epsilon(1e-10));
  }
  // Full partition hits n exactly.
  const DesignProblem p = make(8, run(0, 3), run(4, 7));
  CHECK(message_power(p, BinarySequence{1, -1, 1, 1, -1, -1, 1, 1}) +
            interferer_power(p, BinarySequence{1, -1, 1, 1, -1, -1, 1, 1}) ==
        doctest::Approx(8.0));
}

TEST_CASE("property: evaluator is deterministic and matches free functions") {
  testing::Gen gen(14);
  const DesignProblem p = gen.problem(20, 4, 3, 2.0);
  const BandEvaluator eval(p);
  for (int trial = 0; trial < 20; ++trial) {
    const BinarySequence s = gen.sequence(20);
    const MetricBundle a = eval.evaluate(s);
    const MetricBundle b = eval.evaluate(s);
    CHECK(a.message_power == b.message_power);
    CHECK(a.interferer_power == b.interferer_power);
    CHECK(a.message_power == doctest::Approx(message_power(p, s)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(eval.evaluate(BinarySequence::ones(19)), LengthMismatchError);
}
