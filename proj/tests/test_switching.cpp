#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "flocksim/rng.hpp"
#include "flocksim/switching.hpp"
#include "test_support.hpp"

using flocksim::BlockSequence;
using flocksim::IncrementDistribution;
using flocksim::SwitchingSchedule;

TEST_CASE("increment distribution factories validate their support") {
  CHECK_NOTHROW(IncrementDistribution::uniform(0.5, 1.5));
  CHECK_THROWS_AS(IncrementDistribution::uniform(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(IncrementDistribution::uniform(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(IncrementDistribution::deterministic(0.0), std::invalid_argument);
  CHECK_THROWS_AS(IncrementDistribution::truncated_exponential(0.0, 0.5, 1.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(IncrementDistribution::truncated_exponential(1.0, 1.5, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(IncrementDistribution::exponential(-1.0), std::invalid_argument);

  CHECK(IncrementDistribution::uniform(0.5, 1.5).bounded_support());
  CHECK_FALSE(IncrementDistribution::exponential(1.0).bounded_support());
  CHECK(IncrementDistribution::deterministic(0.7).lower_bound() == 0.7);
  CHECK(IncrementDistribution::deterministic(0.7).upper_bound() == 0.7);
  CHECK(std::isinf(IncrementDistribution::exponential(1.0).upper_bound()));
}

TEST_CASE("block index recurrence") {
  // n=1: the very first gap is 1 because floor(c ln 1) = 0.
  CHECK(flocksim::block_indices(1, 5.0, 1).indices == std::vector<long long>{0, 1});

  CHECK(flocksim::block_indices(2, 3.0, 3).indices == std::vector<long long>{0, 2, 6, 11});
  CHECK(flocksim::block_indices(2, 0.1, 2).indices == std::vector<long long>{0, 2, 4});

  CHECK_THROWS_AS(flocksim::block_indices(0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(flocksim::block_indices(2, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(flocksim::block_indices(2, 1.0, 0), std::invalid_argument);

  // Gaps are nondecreasing in the block index.
  flocksim::SplitMix64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(gen.next_below(4));
    const double c = gen.next_in(0.1, 5.0);
    const BlockSequence seq = flocksim::block_indices(n, c, 50);
    REQUIRE(seq.indices.size() == 51);
    for (std::size_t l = 2; l < seq.indices.size(); ++l) {
      const long long prev_gap = seq.indices[l - 1] - seq.indices[l - 2];
      const long long gap = seq.indices[l] - seq.indices[l - 1];
      CHECK(gap >= prev_gap);
    }
  }
}

TEST_CASE("schedule sampling") {
  const flocksim::GraphLibrary lib = testsupport::chain_library();

  SUBCASE("deterministic increments produce an arithmetic time grid") {
    const SwitchingSchedule s =
        flocksim::sample_schedule(lib, IncrementDistribution::deterministic(1.0), 3, 7);
    REQUIRE(s.times.size() == 4);
    CHECK(s.times[0] == 0.0);
    CHECK(s.times[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.times[2] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.times[3] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(s.labels.size() == 3);
    CHECK_FALSE(s.unbounded_support_warning);
  }

  SUBCASE("uniform increments stay inside the support") {
    const SwitchingSchedule s =
        flocksim::sample_schedule(lib, IncrementDistribution::uniform(0.5, 1.5), 1000, 99);
    for (std::size_t l = 0; l + 1 < s.times.size(); ++l) {
      const double inc = s.times[l + 1] - s.times[l];
      CHECK(inc >= 0.5);
      CHECK(inc <= 1.5);
    }
  }

  SUBCASE("single-graph library uses only label 0") {
    const SwitchingSchedule s = flocksim::sample_schedule(
        testsupport::pair_library(), IncrementDistribution::uniform(0.5, 1.5), 50, 3);
    for (int label : s.labels) CHECK(label == 0);
  }

  SUBCASE("identical seeds reproduce the schedule; different seeds do not") {
    const IncrementDistribution dist = IncrementDistribution::uniform(0.5, 1.5);
    const SwitchingSchedule a = flocksim::sample_schedule(lib, dist, 200, 1234);
    const SwitchingSchedule b = flocksim::sample_schedule(lib, dist, 200, 1234);
    const SwitchingSchedule c = flocksim::sample_schedule(lib, dist, 200, 1235);
    CHECK(a.times == b.times);
    CHECK(a.labels == b.labels);
    CHECK(a.times != c.times);
  }

  SUBCASE("unbounded support sets the warning flag") {
    const SwitchingSchedule s =
        flocksim::sample_schedule(lib, IncrementDistribution::exponential(2.0), 20, 5);
    CHECK(s.unbounded_support_warning);
  }

  CHECK_THROWS_AS(
      flocksim::sample_schedule(lib, IncrementDistribution::uniform(0.5, 1.5), 0, 1),
      std::invalid_argument);
}

TEST_CASE("covering sampler reaches the requested horizon") {
  const flocksim::GraphLibrary lib = testsupport::chain_library();
  const SwitchingSchedule s = flocksim::sample_schedule_covering(
      lib, IncrementDistribution::uniform(0.5, 1.5), 25.0, 17);
  CHECK(s.times.back() >= 25.0);
  CHECK(s.times.front() == 0.0);
  for (std::size_t l = 0; l + 1 < s.times.size(); ++l) CHECK(s.times[l] < s.times[l + 1]);
  // Minimal cover: dropping the last interval must fall short of the horizon.
  CHECK(s.times[s.times.size() - 2] < 25.0);
}

TEST_CASE("uniform increments pass a Kolmogorov-Smirnov sanity check") {
  const flocksim::GraphLibrary lib = testsupport::chain_library();
  const SwitchingSchedule s =
      flocksim::sample_schedule(lib, IncrementDistribution::uniform(0.5, 1.5), 2000, 2024);
  std::vector<double> increments;
  for (std::size_t l = 0; l + 1 < s.times.size(); ++l) {
    increments.push_back(s.times[l + 1] - s.times[l]);
  }
  std::sort(increments.begin(), increments.end());
  double ks = 0.0;
  const double n = static_cast<double>(increments.size());
  for (std::size_t i = 0; i < increments.size(); ++i) {
    const double cdf = increments[i] - 0.5;  // uniform(0.5, 1.5) CDF
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - cdf));
  }
  // 1% critical value is about 1.63/sqrt(n) ~ 0.036; generous headroom.
  CHECK(ks < 0.05);
}

TEST_CASE("label lookup is right-continuous on the half-open span") {
  SwitchingSchedule s;
  s.times = {0.0, 1.0, 2.5, 4.0};
  s.labels = {1, 0, 1};
  CHECK(flocksim::sigma_at(s, 0.0) == 1);
  CHECK(flocksim::sigma_at(s, 0.5) == 1);
  CHECK(flocksim::sigma_at(s, 2.5) == 1);  // exactly at a switch: new label
  CHECK(flocksim::sigma_at(s, 3.999) == 1);
  CHECK(flocksim::sigma_at(s, 1.0) == 0);
  CHECK_THROWS_AS(flocksim::sigma_at(s, 4.0), std::out_of_range);
  CHECK_THROWS_AS(flocksim::sigma_at(s, -0.1), std::out_of_range);
}

TEST_CASE("block union graphs") {
  const flocksim::GraphLibrary lib = testsupport::chain_library();
  SwitchingSchedule s;
  s.times = {0.0, 1.0, 2.0, 3.0, 4.0};
  s.labels = {0, 0, 0, 1};
  const BlockSequence blocks = flocksim::block_indices(2, 0.1, 2);  // [0, 2, 4]

  // Block 0 uses label 0 twice: exactly graph 0.
  const flocksim::Digraph b0 = flocksim::block_union_graph(s, lib, blocks, 0);
  CHECK(b0.edges() == lib.graphs[0].edges());

  // Block 1 sees both labels: the whole library union.
  const flocksim::Digraph b1 = flocksim::block_union_graph(s, lib, blocks, 1);
  CHECK(b1.edges() == flocksim::union_graphs({lib.graphs[0], lib.graphs[1]}).edges());
  CHECK(flocksim::has_spanning_tree(b1));

  CHECK_THROWS_AS(flocksim::block_union_graph(s, lib, blocks, 2), std::invalid_argument);

  SwitchingSchedule shorter;
  shorter.times = {0.0, 1.0, 2.0};
  shorter.labels = {0, 0};
  CHECK_THROWS_AS(flocksim::block_union_graph(shorter, lib, blocks, 1), std::invalid_argument);
}

TEST_CASE("all-blocks spanning predicate") {
  const BlockSequence blocks = flocksim::block_indices(2, 0.1, 2);  // [0, 2, 4]

  SUBCASE("single spanning graph always passes") {
    const flocksim::GraphLibrary lib = testsupport::pair_library();
    const SwitchingSchedule s = flocksim::sample_schedule(
        lib, IncrementDistribution::uniform(0.5, 1.5), 4, 9);
    CHECK(flocksim::blocks_all_spanning(s, lib, blocks, 2));
  }

  SUBCASE("a block stuck on one chain graph fails") {
    const flocksim::GraphLibrary lib = testsupport::chain_library();
    SwitchingSchedule s;
    s.times = {0.0, 1.0, 2.0, 3.0, 4.0};
    s.labels = {0, 0, 0, 1};  // block 0 never sees graph 1
    CHECK_FALSE(flocksim::blocks_all_spanning(s, lib, blocks, 2));
    s.labels = {0, 1, 0, 1};
    CHECK(flocksim::blocks_all_spanning(s, lib, blocks, 2));
  }
}

TEST_CASE("block parameter selection") {
  SUBCASE("worked parameter set") {
    const flocksim::BlockParameters bp =
        flocksim::choose_block_parameters(1.0, 0.1, 3, {0.5, 0.5}, 0.0);
    CHECK(bp.n == 2);
    // c = (1/ln 2 + 1/0.2) / 2
    CHECK(bp.c == doctest::Approx(3.2213475204444817).epsilon(1e-14));
  }

  SUBCASE("certain graphs zero out the reciprocal-m term") {
    const flocksim::BlockParameters bp =
        flocksim::choose_block_parameters(1.0, 0.5, 3, {1.0}, 0.0);
    CHECK(bp.n == 1);
    CHECK(bp.c == doctest::Approx(0.5).epsilon(1e-15));
  }

  SUBCASE("infeasible main condition throws") {
    CHECK_THROWS_AS(flocksim::choose_block_parameters(1.0, 100.0, 3, {0.5, 0.5}, 0.0),
                    std::invalid_argument);
    // epsilon at the boundary 1/(N-1) - kappa*b/m is infeasible too.
    CHECK_THROWS_AS(flocksim::choose_block_parameters(1.0, 0.1, 3, {0.5, 0.5}, 0.4),
                    std::invalid_argument);
  }

  SUBCASE("returned pair satisfies the postcondition inequalities") {
    flocksim::SplitMix64 gen(23);
    for (int trial = 0; trial < 50; ++trial) {
      const double kappa = gen.next_in(0.2, 2.0);
      const double b = gen.next_in(0.01, 0.2);
      const int n_particles = 2 + static_cast<int>(gen.next_below(5));
      const std::vector<double> probs = {0.5, 0.5};
      const double m = std::log(2.0);
      const double eps_max = 1.0 / (n_particles - 1) - kappa * b / m;
      if (!(eps_max > 0.0)) continue;
      const double epsilon = gen.next_unit() * 0.5 * eps_max;
      const flocksim::BlockParameters bp =
          flocksim::choose_block_parameters(kappa, b, n_particles, probs, epsilon);
      CHECK(kappa * b * (n_particles - 1) * bp.c < 1.0);
      CHECK(bp.c * m > 1.0);
      CHECK(std::pow(0.5, bp.n) * 2.0 <= 0.5 + 1e-15);
    }
  }
}

TEST_CASE("spanning probability lower bound") {
  SUBCASE("certain single graph gives probability one") {
    CHECK(flocksim::spanning_probability_lower_bound(testsupport::pair_library(), 2, 3.0) ==
          1.0);
  }

  SUBCASE("worked value at c = 3") {
    // Independent high-precision evaluation of the regrouped series gives
    // S = 1.7152870405746127 and p(n) = exp(-2 ln2 * 2 * 0.25 * S).
    const flocksim::SpanningProbabilityBound detail =
        flocksim::spanning_probability_lower_bound_detailed({0.5, 0.5}, 2, 3.0);
    CHECK(detail.value == doctest::Approx(0.30454196780504200).epsilon(1e-10));
    CHECK(detail.series_terms > 0);
    CHECK(detail.series_tail >= 0.0);
    CHECK(detail.series_tail <= 1e-11);
    CHECK(flocksim::spanning_probability_lower_bound(testsupport::chain_library(), 2, 3.0) ==
          detail.value);
  }

  SUBCASE("worked value at the chosen block coefficient") {
    const double c = flocksim::choose_block_parameters(1.0, 0.1, 3, {0.5, 0.5}, 0.0).c;
    const double p_n =
        flocksim::spanning_probability_lower_bound_detailed({0.5, 0.5}, 2, c).value;
    CHECK(p_n == doctest::Approx(0.32743428085243717).epsilon(1e-10));
  }

  SUBCASE("preconditions") {
    // c at or below 1/m makes the series diverge.
    CHECK_THROWS_AS(flocksim::spanning_probability_lower_bound_detailed(
                        {0.5, 0.5}, 2, 0.5 / std::log(2.0)),
                    std::invalid_argument);
    // sum_k (1-p_k)^n must not exceed 1/2.
    CHECK_THROWS_AS(flocksim::spanning_probability_lower_bound_detailed({0.5, 0.5}, 1, 3.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        flocksim::spanning_probability_lower_bound_detailed({0.5, 0.5}, 2, 3.0, -1.0),
        std::invalid_argument);
  }

  SUBCASE("truncation audit: partial sums stay below the value with tail") {
    // Recompute the inner series naively for 20000 terms; the detailed
    // result (partial + analytic tail) must dominate every partial sum.
    const double c = 3.0;
    const double one_minus_p = 0.5;
    double partial = 0.0;
    double previous = -1.0;
    for (long long l = 0; l < 20000; ++l) {
      partial += std::pow(one_minus_p,
                          std::floor(c * std::log(static_cast<double>(l) + 1.0)));
      CHECK(partial > previous);  // strictly increasing
      previous = partial;
    }
    // p(n) = exp(-2 ln2 * sum_k (1-p_k)^n * S_k) with S_k >= partial.
    const flocksim::SpanningProbabilityBound detail =
        flocksim::spanning_probability_lower_bound_detailed({0.5, 0.5}, 2, c);
    const double with_partial =
        std::exp(-2.0 * std::log(2.0) * (0.25 * partial + 0.25 * partial));
    CHECK(detail.value <= with_partial + 1e-15);
  }
}

TEST_CASE("schedule CSV round-trip") {
  const flocksim::GraphLibrary lib = testsupport::chain_library();
  const SwitchingSchedule s =
      flocksim::sample_schedule(lib, IncrementDistribution::uniform(0.5, 1.5), 25, 77);
  const std::string text = flocksim::schedule_to_csv(s);
  CHECK(text.rfind("index,time,label\n", 0) == 0);

  const SwitchingSchedule back = flocksim::schedule_from_csv(text);
  CHECK(back.times == s.times);  // %.17g survives the double round-trip
  CHECK(back.labels == s.labels);

  CHECK_THROWS_AS(flocksim::schedule_from_csv("index,time,label\n0,0.0\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(flocksim::schedule_from_csv("index,time,label\n"), std::invalid_argument);
}
