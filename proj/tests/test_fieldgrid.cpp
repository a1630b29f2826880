#include "oamfso/fieldgrid.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

using namespace oamfso;

namespace {

const BeamParams kBeam{1.6e-2, 1550e-9};
const GridSpec kGrid{512, 5e-3};

// sqrt(2 <r^2>) measured on the grid.
double grid_second_moment_radius(const ScalarField& f) {
  double num = 0.0, den = 0.0;
  for (int r = 0; r < f.grid.n; ++r)
    for (int c = 0; c < f.grid.n; ++c) {
      const double x = f.grid.coordinate(c), y = f.grid.coordinate(r);
      const double p = std::norm(f.at(r, c));
      num += (x * x + y * y) * p;
      den += p;
    }
  return std::sqrt(2.0 * num / den);
}

// Same quantity from the analytic p = 0 intensity by 1-D radial quadrature:
// |u|^2 ~ r^(2|m|) exp(-2 r^2 / w^2), weight 2 pi r dr.
double quadrature_second_moment_radius(int m, double w) {
  const int steps = 200000;
  const double rmax = 12.0 * w;
  const double h = rmax / steps;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double r = (i + 0.5) * h;
    const double intensity = std::pow(r / w, 2.0 * std::abs(m)) * std::exp(-2.0 * r * r / (w * w));
    num += r * r * intensity * r;
    den += intensity * r;
  }
  return std::sqrt(2.0 * num / den);
}

ScalarField random_field(const GridSpec& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  ScalarField f(g, 0.0);
  for (auto& s : f.samples) s = cplx(n(rng), n(rng));
  return f;
}

}  // namespace

TEST_SUITE("fieldgrid") {

TEST_CASE("grid and beam invariants") {
  CHECK_NOTHROW(kGrid.validate());
  CHECK_THROWS_AS((GridSpec{500, 5e-3}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{512, 0.0}.validate()), std::invalid_argument);
  CHECK(kGrid.half_width() == doctest::Approx(1.28));
  CHECK(kGrid.coordinate(256) == doctest::Approx(2.5e-3));
  CHECK(kBeam.rayleigh_range() == doctest::Approx(518.9).epsilon(1e-3));
  CHECK(kBeam.wavenumber() == doctest::Approx(4.0537e6).epsilon(1e-4));
  CHECK_THROWS_AS(BeamParams(0.0, 1550e-9), std::invalid_argument);
}

TEST_CASE("lg_field has unit discrete power") {
  LgDiagnostics diag;
  const ScalarField f = lg_field({0, 1}, kBeam, 0.0, kGrid, &diag);
  CHECK(power(f) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(diag.analytic_power == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_FALSE(diag.undersized_grid_warning);
}

TEST_CASE("neighbouring and opposite charges are orthogonal") {
  const auto a = lg_field({0, 1}, kBeam, 0.0, kGrid);
  const auto b = lg_field({0, 2}, kBeam, 0.0, kGrid);
  CHECK(std::abs(inner_product(a, b)) < 1e-6);
  const auto c = lg_field({0, 3}, kBeam, 0.0, kGrid);
  const auto d = lg_field({0, -3}, kBeam, 0.0, kGrid);
  CHECK(std::abs(inner_product(c, d)) < 1e-6);
}

TEST_CASE("second-moment radius at 1 km") {
  const int m = 10;
  const double z = 1000.0;
  const double w = kBeam.radius_at(z);
  // The quadrature oracle and the closed form must agree before either is
  // used as a reference.
  const double oracle = quadrature_second_moment_radius(m, w);
  CHECK(oracle == doctest::Approx(w * std::sqrt(m + 1.0)).epsilon(1e-6));
  const auto f = lg_field({0, m}, kBeam, z, kGrid);
  CHECK(grid_second_moment_radius(f) == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("grid-size checks") {
  const GridSpec small{64, 5e-3};  // half-width 0.16 m
  LgDiagnostics diag;
  lg_field({0, 1}, kBeam, 0.0, GridSpec{64, 1.5e-3}, &diag);  // radius 22.6 mm of 48 mm half-width
  CHECK(diag.undersized_grid_warning);
  CHECK_THROWS_AS(lg_field({0, 10}, kBeam, 1000.0, small, nullptr), std::invalid_argument);
}

TEST_CASE("|m| symmetry under mirror") {
  const GridSpec g{128, 4e-3};
  const auto plus = lg_field({0, 4}, kBeam, 300.0, g);
  const auto minus = lg_field({0, -4}, kBeam, 300.0, g);
  // phi -> -phi is the row flip y -> -y on the cell-centred grid.
  double worst = 0.0;
  for (int r = 0; r < g.n; ++r)
    for (int c = 0; c < g.n; ++c)
      worst = std::max(worst, std::abs(std::abs(plus.at(r, c)) - std::abs(minus.at(g.n - 1 - r, c))));
  CHECK(worst == 0.0);
}

TEST_CASE("inner product semantics") {
  SUBCASE("self overlap") {
    const auto f = lg_field({0, 5}, kBeam, 0.0, kGrid);
    const cplx s = inner_product(f, f);
    CHECK(std::abs(s - cplx(1.0, 0.0)) < 1e-12);
  }
  SUBCASE("phase pickup on a tiny grid") {
    const GridSpec g{8, 1e-3};
    ScalarField a(g, 0.0);
    std::mt19937_64 rng(3);
    a = random_field(g, rng);
    const double p = power(a);
    for (auto& s : a.samples) s /= std::sqrt(p);
    ScalarField b = a;
    for (auto& s : b.samples) s *= cplx(0.0, 1.0);
    const cplx v = inner_product(a, b);
    CHECK(v.real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(v.imag() == doctest::Approx(-1.0).epsilon(1e-12));
  }
  SUBCASE("sesquilinear and conjugate symmetric") {
    const GridSpec g{32, 1e-2};
    std::mt19937_64 rng(11);
    const auto a = random_field(g, rng), b = random_field(g, rng), c = random_field(g, rng);
    const cplx alpha(0.3, -1.7), beta(-2.1, 0.4);
    ScalarField lin(g, 0.0);
    for (std::size_t i = 0; i < lin.samples.size(); ++i) lin.samples[i] = alpha * a.samples[i] + beta * b.samples[i];
    const cplx lhs = inner_product(lin, c);
    const cplx rhs = alpha * inner_product(a, c) + beta * inner_product(b, c);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
    const cplx lhs2 = inner_product(c, lin);
    const cplx rhs2 = std::conj(alpha) * inner_product(c, a) + std::conj(beta) * inner_product(c, b);
    CHECK(std::abs(lhs2 - rhs2) <= 1e-10 * std::abs(rhs2));
    CHECK(std::abs(inner_product(a, b) - std::conj(inner_product(b, a))) < 1e-12);
    CHECK(power(a) == doctest::Approx(inner_product(a, a).real()).epsilon(1e-14));
  }
  SUBCASE("power scaling and zero field") {
    const GridSpec g{16, 1e-2};
    std::mt19937_64 rng(5);
    auto a = random_field(g, rng);
    const double p = power(a);
    for (auto& s : a.samples) s *= 2.0;
    CHECK(power(a) == doctest::Approx(4.0 * p).epsilon(1e-14));
    CHECK(power(ScalarField(g, 0.0)) == 0.0);
  }
  SUBCASE("mismatches are errors") {
    const ScalarField a(GridSpec{16, 1e-2}, 0.0);
    CHECK_THROWS_AS(inner_product(a, ScalarField(GridSpec{32, 1e-2}, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(inner_product(a, ScalarField(GridSpec{16, 1e-2}, 5.0)), std::invalid_argument);
  }
}

TEST_CASE("21-mode Gram matrix at the transmitter") {
  std::vector<ScalarField> modes;
  for (int m = -10; m <= 10; ++m) modes.push_back(lg_field({0, m}, kBeam, 0.0, kGrid));
  double worst = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i)
    for (std::size_t j = 0; j < modes.size(); ++j) {
      const cplx expected = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(inner_product(modes[i], modes[j]) - expected));
    }
  CHECK(worst < 1e-3);
}

TEST_CASE("field file round trip") {
  const GridSpec g{32, 1e-2};
  const auto f = lg_field({1, -2}, BeamParams(2e-2, 1e-6), 25.0, g);
  const auto path = std::filesystem::temp_directory_path() / "oamfso_field_roundtrip.oamf";
  write_field(path, f);
  const auto back = read_field(path);
  CHECK(back.grid == f.grid);
  CHECK(back.z == f.z);
  CHECK(back.samples == f.samples);
  CHECK(std::filesystem::file_size(path) == 24 + 16 * g.sample_count());
  std::filesystem::remove(path);
}

}  // TEST_SUITE
