// Generated-case property checks. Each case draws its inputs from a seeded
// stream, so failures are reproducible from the case index.
#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "pslshade/de.hpp"
#include "pslshade/metrics.hpp"
#include "pslshade/prescreen.hpp"

using namespace pslshade;

namespace {

constexpr int kCases = 1000;

Rng case_rng(int property, int k) { return Rng(combine_seed(static_cast<std::uint64_t>(property), static_cast<std::uint64_t>(k))); }

// Draws from a small grid so that ties are common.
std::vector<double> tied_values(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = static_cast<double>(rng.index(4));
  return v;
}

double brute_tau_b(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  long nc = 0, nd = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i >= j) continue;
      const double s = (a[i] - a[j]) * (b[i] - b[j]);
      if (s > 0) ++nc;
      if (s < 0) ++nd;
    }
  // Tie corrections from group sizes.
  auto tie_pairs = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double total = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
      std::size_t j = i;
      while (j < v.size() && v[j] == v[i]) ++j;
      const double t = static_cast<double>(j - i);
      total += t * (t - 1.0) / 2.0;
      i = j;
    }
    return total;
  };
  const double n0 = static_cast<double>(n * (n - 1)) / 2.0;
  return static_cast<double>(nc - nd) / std::sqrt((n0 - tie_pairs(a)) * (n0 - tie_pairs(b)));
}

}  // namespace

TEST_CASE("property: population size follows the linear reduction formula") {
  for (int k = 0; k < kCases; ++k) {
    Rng rng = case_rng(1, k);
    de::ControlParams p;
    p.n_min = 4 + rng.index(5);
    p.n_init = p.n_min + rng.index(500);
    p.max_nfe = static_cast<std::int64_t>(p.n_init + rng.index(200000));
    const auto nfe = static_cast<std::int64_t>(rng.index(static_cast<std::size_t>(p.max_nfe) + 1));
    const double exact = static_cast<double>(p.n_init) +
                         (static_cast<double>(p.n_min) - static_cast<double>(p.n_init)) *
                             static_cast<double>(nfe) / static_cast<double>(p.max_nfe);
    const auto expected = static_cast<std::size_t>(std::llround(exact));
    const auto got = de::lpsr_next_size(p, nfe);
    // The two expressions may straddle a .5 boundary by one ulp.
    REQUIRE(((got == expected) || std::fabs(exact - std::floor(exact) - 0.5) < 1e-9));
    REQUIRE(got >= p.n_min);
    REQUIRE(got <= p.n_init);
    if (nfe > 0) REQUIRE(de::lpsr_next_size(p, nfe - 1) >= got);
  }
}

TEST_CASE("property: external archive respects its capacity") {
  for (int k = 0; k < kCases; ++k) {
    Rng rng = case_rng(2, k);
    const std::size_t n = 4 + rng.index(100);
    const double rate = 0.5 + rng.uniform() * 2.0;
    de::ExternalArchive archive(de::archive_capacity(rate, n));
    REQUIRE(archive.capacity() == static_cast<std::size_t>(std::floor(rate * static_cast<double>(n))));
    const std::size_t inserts = rng.index(3 * archive.capacity() + 2);
    for (std::size_t i = 0; i < inserts; ++i) {
      archive.insert(de::Vector{static_cast<double>(i)}, rng);
      REQUIRE(archive.size() <= archive.capacity());
    }
    const std::size_t smaller = rng.index(n) + 1;
    archive.resize(de::archive_capacity(rate, smaller), rng);
    REQUIRE(archive.size() <= de::archive_capacity(rate, smaller));
    // Inserted positions were distinct, so the archive must stay duplicate-free.
    auto entries = archive.entries();
    std::sort(entries.begin(), entries.end());
    REQUIRE(std::adjacent_find(entries.begin(), entries.end()) == entries.end());
  }
}

TEST_CASE("property: sample archive stays bounded, duplicate-free and improving") {
  for (int k = 0; k < kCases; ++k) {
    Rng rng = case_rng(3, k);
    const std::size_t dim = 1 + rng.index(4);
    prescreen::SampleArchive archive(1 + rng.index(30));
    double worst_when_full = std::numeric_limits<double>::infinity();
    const std::size_t inserts = rng.index(120);
    std::vector<de::Vector> seen;
    for (std::size_t i = 0; i < inserts; ++i) {
      de::Vector x(dim);
      // Occasionally repeat an earlier position or reuse a fitness value.
      if (!seen.empty() && rng.uniform() < 0.2) {
        x = seen[rng.index(seen.size())];
      } else {
        for (double& v : x) v = std::round(rng.uniform(-5.0, 5.0));
      }
      seen.push_back(x);
      const double f = std::round(rng.uniform(0.0, 50.0));
      archive.insert(x, f);
      REQUIRE(archive.size() <= archive.capacity());
      const auto& e = archive.entries();
      for (std::size_t a = 0; a < e.size(); ++a)
        for (std::size_t b = a + 1; b < e.size(); ++b) {
          REQUIRE(std::fabs(e[a].fitness - e[b].fitness) > prescreen::kSimilarityTolerance);
          bool same = true;
          for (std::size_t d = 0; d < dim; ++d) same = same && std::fabs(e[a].position[d] - e[b].position[d]) <= 1e-12;
          REQUIRE_FALSE(same);
        }
      if (archive.full()) {
        REQUIRE(archive.worst_fitness() <= worst_when_full);
        worst_when_full = archive.worst_fitness();
      }
    }
  }
}

TEST_CASE("property: feature vector length and layout") {
  for (int k = 0; k < kCases; ++k) {
    Rng rng = case_rng(4, k);
    const std::size_t dim = 1 + rng.index(40);
    de::Vector x(dim);
    for (double& v : x) v = rng.uniform(-100.0, 100.0);
    const auto f = prescreen::feature_map(x);
    REQUIRE(f.size() == (dim * dim + 7 * dim) / 2 + 1);
    REQUIRE(f.size() == 1 + dim + dim + dim * (dim - 1) / 2 + dim + dim);
    REQUIRE(f[0] == 1.0);
    const std::size_t d = rng.index(dim);
    REQUIRE(f[1 + d] == x[d]);
    REQUIRE(f[1 + dim + d] == x[d] * x[d]);
    REQUIRE(f[f.size() - 2 * dim + d] == 1.0 / x[d]);
    REQUIRE(f[f.size() - dim + d] == 1.0 / (x[d] * x[d]));
  }
}

TEST_CASE("property: score pipeline conserves rank sums and bounds the scores") {
  for (int k = 0; k < kCases; ++k) {
    Rng rng = case_rng(5, k);
    const std::size_t algos = 2 + rng.index(5);
    const std::size_t reps = 1 + rng.index(4);
    const std::size_t functions = 1 + rng.index(4);
    std::map<std::string, metrics::CellErrors> errors;
    std::size_t cells = 0;
    for (std::size_t a = 0; a < algos; ++a) {
      auto& table = errors["alg" + std::to_string(a)];
      for (std::size_t f = 1; f <= functions; ++f)
        for (const std::size_t dim : {10u, 20u}) {
          auto& v = table[metrics::CellKey{static_cast<int>(f), suite::Combo::None, dim}];
          v = tied_values(reps, rng);
        }
      cells = table.size();
    }
    const auto board = metrics::score_pipeline(errors);
    double sr_sum = 0.0;
    bool top1 = false, top2 = false;
    for (const auto& row : board.rows) {
      sr_sum += row.sr;
      // Score1 is zero when another algorithm solved every cell.
      REQUIRE(row.score1 >= 0.0);
      REQUIRE(row.score1 <= 50.0);
      REQUIRE(row.score2 > 0.0);
      REQUIRE(row.score2 <= 50.0);
      top1 = top1 || row.score1 == 50.0;
      top2 = top2 || row.score2 == 50.0;
    }
    REQUIRE(top1);
    REQUIRE(top2);
    // Each cell carries weight one half.
    const double a = static_cast<double>(algos);
    REQUIRE(sr_sum == doctest::Approx(0.5 * static_cast<double>(cells) * a * (a + 1.0) / 2.0));
  }
}

TEST_CASE("property: hyper-volume equals the brute-force box volume") {
  for (int k = 0; k < kCases; ++k) {
    Rng rng = case_rng(6, k);
    const std::size_t dim = 1 + rng.index(6);
    const std::size_t n = 1 + rng.index(12);
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
    for (auto& p : pts)
      for (double& v : p) v = rng.uniform(-10.0, 10.0);
    double expected = 1.0;
    for (std::size_t d = 0; d < dim; ++d) {
      double lo = pts[0][d], hi = pts[0][d];
      for (const auto& p : pts) {
        lo = std::min(lo, p[d]);
        hi = std::max(hi, p[d]);
      }
      expected *= hi - lo;
    }
    const double hv = metrics::hyper_volume(pts);
    REQUIRE(hv == expected);
    REQUIRE(hv >= 0.0);
    auto shuffled = pts;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.index(i)]);
    REQUIRE(metrics::hyper_volume(shuffled) == doctest::Approx(hv));
    std::vector<double> extra(dim);
    for (double& v : extra) v = rng.uniform(-12.0, 12.0);
    pts.push_back(extra);
    REQUIRE(metrics::hyper_volume(pts) >= hv);
  }
}

TEST_CASE("property: Kendall tau equals a brute-force tau-b on short lists") {
  int defined = 0;
  for (int k = 0; k < kCases; ++k) {
    Rng rng = case_rng(7, k);
    const std::size_t n = 2 + rng.index(7);
    const auto a = tied_values(n, rng);
    const auto b = tied_values(n, rng);
    const auto tau = metrics::kendall_tau(a, b);
    const bool constant = std::adjacent_find(a.begin(), a.end(), std::not_equal_to<>()) == a.end() ||
                          std::adjacent_find(b.begin(), b.end(), std::not_equal_to<>()) == b.end();
    REQUIRE(tau.has_value() == !constant);
    if (tau) {
      ++defined;
      REQUIRE(*tau == doctest::Approx(brute_tau_b(a, b)).epsilon(1e-12));
      REQUIRE(*tau >= -1.0 - 1e-12);
      REQUIRE(*tau <= 1.0 + 1e-12);
    }
  }
  CHECK(defined >= 900);
}

TEST_CASE("property: parameter memory stays in range and terminal slots persist") {
  for (int k = 0; k < kCases; ++k) {
    Rng rng = case_rng(8, k);
    de::ParameterMemory m(1 + rng.index(8), 0.5, 0.5);
    std::vector<bool> was_terminal(m.slots(), false);
    for (int g = 0; g < 20; ++g) {
      std::vector<de::Success> sf, scr;
      const std::size_t n = rng.index(5);
      const bool zero_cr = rng.uniform() < 0.1;
      for (std::size_t i = 0; i < n; ++i) {
        const double delta = rng.uniform() + 1e-9;
        sf.push_back({de::sample_f(0.5, rng), delta});
        scr.push_back({zero_cr ? 0.0 : de::clip_cr(rng.normal(0.5, 0.3)), delta});
      }
      m.update(sf, scr);
      for (std::size_t s = 0; s < m.slots(); ++s) {
        REQUIRE(m.f(s) > 0.0);
        REQUIRE(m.f(s) <= 1.0);
        if (was_terminal[s]) REQUIRE(m.terminal(s));
        was_terminal[s] = m.terminal(s);
        if (const auto cr = m.cr(s)) {
          REQUIRE(*cr >= 0.0);
          REQUIRE(*cr <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("property: meta-model reproduces random members of its span") {
  for (int k = 0; k < kCases; ++k) {
    Rng rng = case_rng(9, k);
    const std::size_t dim = 1 + rng.index(3);
    const std::size_t p = prescreen::df_mm(dim);
    Eigen::VectorXd coef(static_cast<Eigen::Index>(p));
    for (Eigen::Index c = 0; c < coef.size(); ++c) coef[c] = rng.uniform(-1.0, 1.0);
    const auto truth = prescreen::MetaModel::from_coefficients(coef, dim);
    std::vector<de::Vector> pts(p + 20, de::Vector(dim));
    std::vector<double> vals;
    for (auto& x : pts) {
      for (double& v : x) v = rng.uniform(-100.0, 100.0);
      vals.push_back(truth.predict(x));
    }
    const auto model = prescreen::fit(pts, vals);
    REQUIRE(model.fitted());
    for (int probe = 0; probe < 5; ++probe) {
      de::Vector x(dim);
      for (double& v : x) v = rng.uniform(-100.0, 100.0);
      const double expected = truth.predict(x);
      REQUIRE(std::fabs(model.predict(x) - expected) <= 1e-6 * std::max(1.0, std::fabs(expected)));
    }
  }
}

TEST_CASE("property: random choice accuracy converges to one over N_s") {
  for (const std::size_t ns : {2u, 5u, 10u}) {
    Rng rng(ns);
    std::size_t hits = 0;
    const std::size_t events = 20000;
    for (std::size_t e = 0; e < events; ++e) {
      std::vector<double> v(ns);
      for (double& x : v) x = rng.uniform();
      hits += metrics::selection_accuracy(v, rng.index(ns)) ? 1 : 0;
    }
    CHECK(std::fabs(static_cast<double>(hits) / static_cast<double>(events) - 1.0 / static_cast<double>(ns)) <= 0.03);
  }
}
