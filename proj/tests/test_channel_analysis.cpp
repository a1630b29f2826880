#include "oamfso/channel_analysis.hpp"

#include <doctest.h>

#include <Eigen/QR>
#include <cmath>
#include <random>
#include <sstream>

using namespace oamfso;

namespace {

Eigen::MatrixXcd random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

Eigen::MatrixXcd random_unitary(int n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_matrix(n, rng));
  return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

ChannelEnsemble ensemble_of(std::vector<int> charges, std::vector<Eigen::MatrixXcd> mats) {
  ChannelEnsemble e;
  e.charges = std::move(charges);
  e.realizations = std::move(mats);
  return e;
}

}  // namespace

TEST_SUITE("channel_analysis") {

TEST_CASE("mode sets") {
  const ModeSet s({10, -10, 0});
  CHECK(s.charges() == std::vector<int>{-10, 0, 10});
  CHECK_THROWS_AS(ModeSet({1, 1}), std::invalid_argument);
  std::ostringstream os;
  os << s;
  CHECK(os.str() == "{-10,0,+10}");
  CHECK(ModeSet({-10, 10}) < ModeSet({-9, 9}));
}

TEST_CASE("MDL values") {
  CHECK(mdl_db(Eigen::MatrixXcd::Identity(3, 3)).db == 0.0);
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 1.0;
  // Eigenvalues of H^H H are 4 and 1.
  CHECK(mdl_db(d).db == doctest::Approx(10.0 * std::log10(4.0)).epsilon(1e-12));
  CHECK(mdl_db(d).db == doctest::Approx(6.0206).epsilon(1e-4));

  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto h = random_matrix(4, rng);
    const double base = mdl_db(h).db;
    CHECK(base >= 0.0);
    CHECK(mdl_db(cplx(-3.2, 0.7) * h).db == doctest::Approx(base).epsilon(1e-10));
    const auto u = random_unitary(4, rng), v = random_unitary(4, rng);
    CHECK(std::abs(mdl_db(u * h * v).db - base) < 1e-8);
  }

  Eigen::MatrixXcd singular(2, 2);
  singular << 1.0, 2.0, 2.0, 4.0;
  const auto v = mdl_db(singular);
  CHECK(v.rank_deficient);
  CHECK(std::isinf(v.db));
}

TEST_CASE("submatrix selection") {
  std::mt19937_64 rng(8);
  const std::vector<int> charges{-2, -1, 0, 1, 2};
  const auto h = random_matrix(5, rng);
  CHECK(submatrix(h, charges, ModeSet(charges)) == h);
  const auto s = submatrix(h, charges, ModeSet({2, -1}));
  REQUIRE(s.rows() == 2);
  CHECK(s(0, 0) == h(1, 1));
  CHECK(s(0, 1) == h(1, 4));
  CHECK(s(1, 0) == h(4, 1));
  CHECK(s(1, 1) == h(4, 4));
  CHECK_THROWS_AS(submatrix(h, charges, ModeSet({3})), std::invalid_argument);

  ChannelMatrix cm{{{0, -2}, {0, -1}, {0, 0}, {0, 1}, {0, 2}}, h};
  const auto cs = submatrix(cm, ModeSet({0, 2}));
  CHECK(cs.modes.size() == 2);
  CHECK(cs.modes[1].m == 2);
  CHECK(cs.h(1, 0) == h(4, 2));

  // A submatrix can have a larger or a smaller MDL than its parent.
  bool larger = false, smaller = false;
  for (int t = 0; t < 1000 && !(larger && smaller); ++t) {
    const auto p = random_matrix(3, rng);
    const double sub = mdl_db(submatrix(p, {0, 1, 2}, ModeSet({0, 1}))).db;
    const double parent = mdl_db(p).db;
    larger |= sub > parent;
    smaller |= sub < parent;
  }
  CHECK(larger);
  CHECK(smaller);
}

TEST_CASE("ensemble averages") {
  std::mt19937_64 rng(12);
  const auto h = random_matrix(3, rng);
  const auto e = ensemble_of({-1, 0, 1}, {h, h, h, h});
  const auto st = average_mdl(e, ModeSet({-1, 0, 1}));
  CHECK(st.mean_db == doctest::Approx(mdl_db(h).db).epsilon(1e-14));
  CHECK(st.stderr_db == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(st.used == 4);

  Eigen::MatrixXcd singular = Eigen::MatrixXcd::Zero(3, 3);
  singular(0, 0) = 1.0;
  const auto mixed = ensemble_of({-1, 0, 1}, {h, singular});
  const auto ms = average_mdl(mixed, ModeSet({-1, 0, 1}));
  CHECK(ms.used == 1);
  CHECK(ms.excluded == 1);
  CHECK(ms.mean_db == doctest::Approx(mdl_db(h).db));

  CHECK_THROWS_AS(average_mdl(ensemble_of({0, 1}, {}), ModeSet({0, 1})), std::invalid_argument);

  Eigen::MatrixXcd x(2, 2);
  x << 1.0, 0.5, 0.0, 1.0;
  // One realization, off-diagonal power 0.25 of total 2.25.
  CHECK(mean_crosstalk(ensemble_of({0, 1}, {x}), ModeSet({0, 1})) == doctest::Approx(0.25 / 2.25));
}

TEST_CASE("subset search") {
  SUBCASE("smallest MDL wins") {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(4, 4);
    g.diagonal() << 1.0, 0.5, 0.9, 0.95;
    const auto e = ensemble_of({-2, -1, 1, 2}, {g});
    const auto sel = select_modes(e, 2);
    CHECK(sel.modes == ModeSet({-2, 2}));  // 1 / 0.95 beats 0.95 / 0.9
    CHECK(sel.subsets_searched == 6);
    CHECK(select_modes(e, 3).modes == ModeSet({-2, 1, 2}));
  }
  SUBCASE("equal MDL falls back to crosstalk, then charge order") {
    // {0,1} and {2,3} both have MDL exactly 0; {0,1} leaks half its power.
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(4, 4);
    g(0, 0) = 1.0;
    g(0, 1) = 1.0;
    g(1, 0) = -1.0;
    g(1, 1) = 1.0;
    g(2, 2) = 2.0;
    g(3, 3) = 2.0;
    REQUIRE(mdl_db(g.block(0, 0, 2, 2)).db == 0.0);
    const auto e = ensemble_of({0, 1, 2, 3}, {g});
    CHECK(select_modes(e, 2).modes == ModeSet({2, 3}));

    const auto flat = ensemble_of({5, 6, 7}, {Eigen::MatrixXcd::Identity(3, 3)});
    CHECK(select_modes(flat, 2).modes == ModeSet({5, 6}));
  }
  SUBCASE("result does not depend on the candidate order or thread count") {
    std::mt19937_64 rng(3);
    std::vector<Eigen::MatrixXcd> mats, permuted;
    const std::vector<int> perm{3, 0, 4, 1, 2};
    for (int r = 0; r < 30; ++r) {
      const auto h = random_matrix(5, rng);
      mats.push_back(h);
      Eigen::MatrixXcd p(5, 5);
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) p(i, j) = h(perm[i], perm[j]);
      permuted.push_back(p);
    }
    const std::vector<int> charges{-2, -1, 0, 1, 2};
    std::vector<int> pcharges;
    for (int i : perm) pcharges.push_back(charges[i]);
    const auto a = select_modes(ensemble_of(charges, mats), 3, 1);
    const auto b = select_modes(ensemble_of(pcharges, permuted), 3, 4);
    CHECK(a.modes == b.modes);
    CHECK(a.stats.mean_db == doctest::Approx(b.stats.mean_db).epsilon(1e-12));
  }
  CHECK_THROWS_AS(select_modes(ensemble_of({0, 1}, {Eigen::MatrixXcd::Identity(2, 2)}), 3), std::invalid_argument);
}

TEST_CASE("pairwise MDL map") {
  std::mt19937_64 rng(9);
  std::vector<Eigen::MatrixXcd> mats;
  for (int r = 0; r < 20; ++r) mats.push_back(random_matrix(4, rng));
  const auto e = ensemble_of({-1, 0, 1, 2}, mats);
  Eigen::MatrixXd err;
  const auto map = mdl_map(e, 2, &err);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::isnan(map(i, i)));
    for (int j = 0; j < 4; ++j)
      if (i != j) {
        CHECK(map(i, j) == map(j, i));
        CHECK(map(i, j) == doctest::Approx(average_mdl(e, ModeSet({e.charges[i], e.charges[j]})).mean_db));
        CHECK(err(i, j) > 0.0);
      }
  }
  std::ostringstream os;
  write_mdl_map_csv(os, e.charges, map);
  const std::string csv = os.str();
  CHECK(csv.rfind("p,-1,0,1,2\n-1,nan,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

}  // TEST_SUITE
