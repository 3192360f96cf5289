#include <cmath>
#include <sstream>

#include "doctest.h"
#include "pslshade/errors.hpp"
#include "pslshade/metrics.hpp"
#include "pslshade/random.hpp"

using namespace pslshade;
using namespace pslshade::metrics;

namespace {

const CellKey k10{1, suite::Combo::None, 10};
const CellKey k20{1, suite::Combo::None, 20};

}  // namespace

TEST_CASE("checkpoint ladder") {
  const auto c = checkpoint_nfes(10000, 10);
  REQUIRE(c.size() == 16);
  CHECK(c[0] == 10);
  CHECK(c[5] == 100);
  CHECK(c[10] == 1000);
  CHECK(c[15] == 10000);
  for (std::size_t k = 1; k < c.size(); ++k) CHECK(c[k] >= c[k - 1]);
  const auto d = checkpoint_nfes(20000, 20);
  CHECK(d[0] == 3);  // ceil(20000 / 8000)
  CHECK(d[15] == 20000);
}

TEST_CASE("normalized error") {
  CHECK(normalized_error(1.0, 1.0, 9.0) == 0.0);
  CHECK(normalized_error(9.0, 1.0, 9.0) == 1.0);
  CHECK(normalized_error(5.0, 1.0, 9.0) == 0.5);
  CHECK(normalized_error(1.0, 1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(normalized_error(5.0, 1.0, 4.0), InputError);
}

TEST_CASE("score pipeline") {
  SUBCASE("single algorithm scores 100") {
    std::map<std::string, CellErrors> e{{"a", {{k10, {1.0, 2.0}}, {k20, {3.0, 0.5}}}}};
    const auto board = score_pipeline(e);
    CHECK(board.at("a").score == 100.0);
  }
  SUBCASE("identical records tie at 100 with shared ranks") {
    const CellErrors same{{k10, {1.0, 2.0}}, {k20, {3.0, 0.5}}};
    const auto board = score_pipeline({{"a", same}, {"b", same}});
    CHECK(board.at("a").score == 100.0);
    CHECK(board.at("b").score == 100.0);
    CHECK(board.at("a").sr == doctest::Approx(1.5));
  }
  SUBCASE("three algorithms against hand arithmetic") {
    // 10D cell: bests 1/2/4 (worst 4), means 2/2/6 -> ne .25/.5/1, ranks 1.5/1.5/3
    // 20D cell: bests 0/1/2 (worst 2), means 5/1/3 -> ne 0/.5/1, ranks 3/1/2
    std::map<std::string, CellErrors> e{
        {"A", {{k10, {1.0, 3.0}}, {k20, {0.0, 10.0}}}},
        {"B", {{k10, {2.0, 2.0}}, {k20, {1.0, 1.0}}}},
        {"C", {{k10, {4.0, 8.0}}, {k20, {2.0, 4.0}}}},
    };
    const auto board = score_pipeline(e);
    CHECK(board.at("A").sne == doctest::Approx(0.125));
    CHECK(board.at("B").sne == doctest::Approx(0.5));
    CHECK(board.at("C").sne == doctest::Approx(1.0));
    CHECK(board.at("A").sr == doctest::Approx(2.25));
    CHECK(board.at("B").sr == doctest::Approx(1.25));
    CHECK(board.at("C").sr == doctest::Approx(2.5));
    CHECK(board.at("A").score1 == doctest::Approx(50.0));
    CHECK(board.at("B").score1 == doctest::Approx(12.5));
    CHECK(board.at("C").score1 == doctest::Approx(6.25));
    CHECK(board.at("A").score2 == doctest::Approx(50.0 * 1.25 / 2.25));
    CHECK(board.at("B").score2 == doctest::Approx(50.0));
    CHECK(board.at("C").score2 == doctest::Approx(25.0));
    CHECK(board.at("A").score == doctest::Approx(50.0 + 50.0 * 1.25 / 2.25));
    CHECK(board.at("B").score == doctest::Approx(62.5));
    CHECK(board.at("C").score == doctest::Approx(31.25));
  }
  SUBCASE("all-solved cells give zero normalized error and Score1 = 50") {
    const CellErrors zero{{k10, {0.0, 0.0}}};
    const auto board = score_pipeline({{"a", zero}, {"b", zero}});
    CHECK(board.at("a").sne == 0.0);
    CHECK(board.at("a").score1 == 50.0);
  }
  SUBCASE("ragged inputs are rejected") {
    CHECK_THROWS_AS(score_pipeline({{"a", {{k10, {1.0, 2.0}}}}, {"b", {{k10, {1.0}}}}}), InputError);
    CHECK_THROWS_AS(score_pipeline({{"a", {{k10, {1.0}}}}, {"b", {{k20, {1.0}}}}}), InputError);
    CHECK_THROWS_AS(score_pipeline({}), InputError);
  }
}

TEST_CASE("hyper-volume") {
  const std::vector<std::vector<double>> one{{3.0, 4.0}};
  CHECK(hyper_volume(one) == 0.0);
  const std::vector<std::vector<double>> two{{0.0, 0.0}, {2.0, 3.0}};
  CHECK(hyper_volume(two) == 6.0);
  Rng rng(1);
  std::vector<std::vector<double>> five(5, std::vector<double>(3));
  for (auto& p : five)
    for (double& v : p) v = rng.uniform(-10.0, 10.0);
  double expected = 1.0;
  for (std::size_t d = 0; d < 3; ++d) {
    double lo = 1e300, hi = -1e300;
    for (const auto& p : five) {
      if (p[d] < lo) lo = p[d];
      if (p[d] > hi) hi = p[d];
    }
    expected *= hi - lo;
  }
  CHECK(hyper_volume(five) == expected);
}

TEST_CASE("selection accuracy") {
  const std::vector<double> v{3.0, 1.0, 2.0};
  CHECK(selection_accuracy(v, 1));
  CHECK_FALSE(selection_accuracy(v, 2));
  const std::vector<double> flat{2.0, 2.0, 2.0};
  for (std::size_t j = 0; j < 3; ++j) CHECK(selection_accuracy(flat, j));
}

TEST_CASE("Kendall tau") {
  const std::vector<double> a{1, 2, 3, 4};
  CHECK(*kendall_tau(a, a) == 1.0);
  const std::vector<double> rev{4, 3, 2, 1};
  CHECK(*kendall_tau(a, rev) == -1.0);
  const std::vector<double> b{1, 3, 2, 4};
  CHECK(*kendall_tau(a, b) == doctest::Approx(2.0 / 3.0));
  const std::vector<double> flat{1, 1, 1, 1};
  CHECK_FALSE(kendall_tau(a, flat).has_value());
  CHECK_FALSE(kendall_tau(std::vector<double>{1.0}, std::vector<double>{2.0}).has_value());
}

TEST_CASE("coefficient of determination") {
  const std::vector<double> obs{1, 2, 3, 4};
  CHECK(*r_squared(obs, obs) == 1.0);
  const std::vector<double> mean(4, 2.5);
  CHECK(*r_squared(mean, obs) == 0.0);
  const std::vector<double> fit{1.1, 1.9, 3.2, 3.8};
  // SS_tot = 5, SS_res = 0.01 + 0.01 + 0.04 + 0.04 = 0.1
  CHECK(*r_squared(fit, obs) == doctest::Approx(0.98));
  const std::vector<double> bad{4, 3, 2, 1};
  CHECK(*r_squared_raw(bad, obs) < 0.0);
  CHECK(*r_squared(bad, obs) == 0.0);
  CHECK_FALSE(r_squared(obs, std::vector<double>(4, 7.0)).has_value());
}

TEST_CASE("shared ranks") {
  const std::vector<double> v{5.0, 1.0, 5.0, 3.0};
  CHECK(shared_ranks(v) == std::vector<double>{3.5, 1.0, 3.5, 2.0});
}

TEST_CASE("csv writers") {
  std::ostringstream board;
  write_scoreboard_csv(board, score_pipeline({{"x", {{k10, {1.0}}}}}));
  CHECK(board.str().rfind("algorithm,SNE,SR,Score1,Score2,Score\n", 0) == 0);
  CHECK(board.str().find("x,") != std::string::npos);

  std::ostringstream diag;
  DiagnosticTrace trace{DiagnosticRow{1, 100, std::nan(""), 0.5, 0.5, std::nan(""), 2.0, 7}};
  write_diagnostics_csv(diag, trace);
  CHECK(diag.str() == "generation,nfe,accuracy,r2,tau,hypervolume,archive_size\n1,100,nan,0.5,nan,2,7\n");

  std::istringstream back(diag.str());
  const auto read = read_diagnostics_csv(back);
  REQUIRE(read.size() == 1);
  CHECK(read[0].nfe == 100);
  CHECK(std::isnan(read[0].accuracy));
  CHECK(read[0].r2 == 0.5);
  CHECK(read[0].archive_size == 7);
  std::istringstream bad("generation,nfe\n1,2\n");
  CHECK_THROWS_AS(read_diagnostics_csv(bad), InputError);
}

TEST_CASE("final errors are grouped per algorithm and cell") {
  std::vector<RunRecord> records;
  for (int rep = 0; rep < 3; ++rep) {
    RunRecord r;
    r.algorithm = "lshade";
    r.function = 2;
    r.combo = suite::Combo::S;
    r.dimension = 10;
    r.repetition = rep;
    r.checkpoints = {{10, 5.0}, {100, static_cast<double>(rep)}};
    records.push_back(r);
  }
  const auto grouped = collect_final_errors(records);
  const auto& reps = grouped.at("lshade").at(CellKey{2, suite::Combo::S, 10});
  CHECK(reps == std::vector<double>{0.0, 1.0, 2.0});
}
