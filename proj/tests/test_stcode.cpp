#include "oamfso/decode.hpp"
#include "oamfso/stcode.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

using namespace oamfso;

namespace {

std::vector<cplx> random_qpsk(int k, std::mt19937_64& rng) {
  const auto pts = qpsk::points();
  std::uniform_int_distribution<int> pick(0, 3);
  std::vector<cplx> s(static_cast<std::size_t>(k));
  for (auto& v : s) v = pts[pick(rng)];
  return s;
}

std::vector<cplx> random_complex(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> s(static_cast<std::size_t>(k));
  for (auto& v : s) v = cplx(g(rng), g(rng));
  return s;
}

Eigen::MatrixXcd random_matrix(int n, std::mt19937_64& rng) {
  const auto v = random_complex(n * n, rng);
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), n, n);
}

Eigen::VectorXd real_symbols(const std::vector<cplx>& s) {
  Eigen::VectorXd v(2 * s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    v[k] = s[k].real();
    v[s.size() + k] = s[k].imag();
  }
  return v;
}

}  // namespace

TEST_SUITE("stcode") {

TEST_CASE("QPSK mapping") {
  const std::vector<std::uint8_t> zero{0, 0};
  const auto s = qpsk::modulate(zero);
  CHECK(s[0] == cplx(qpsk::kLevel, qpsk::kLevel));
  CHECK_THROWS_AS(qpsk::modulate(std::vector<std::uint8_t>{1, 0, 1}), std::invalid_argument);

  std::mt19937_64 rng(1);
  std::vector<std::uint8_t> bits(10000);
  for (auto& b : bits) b = rng() & 1u;
  CHECK(qpsk::demap(qpsk::modulate(bits)) == bits);

  const auto pts = qpsk::points();
  double energy = 0.0;
  for (const auto& p : pts) energy += std::norm(p);
  CHECK(energy / 4.0 == doctest::Approx(1.0).epsilon(1e-15));
  // Gray: points at the minimum distance differ in exactly one bit.
  for (unsigned a = 0; a < 4; ++a)
    for (unsigned b = a + 1; b < 4; ++b)
      if (std::abs(pts[a] - pts[b]) < 1.5) CHECK(std::popcount(a ^ b) == 1);
}

TEST_CASE("code specs") {
  CHECK(CodeSpec::make(CodeName::uncoded, 3).symbols == 3);
  CHECK(CodeSpec::make(CodeName::golden).bits_per_codeword() == 8);
  CHECK(CodeSpec::make(CodeName::tast3).real_dimension() == 18);
  CHECK_THROWS_AS(CodeSpec::make(CodeName::golden, 3), std::invalid_argument);
  CHECK_THROWS_AS(parse_code_name("alamouti"), std::invalid_argument);
  CHECK(parse_code_name("silver") == CodeName::silver);
  for (auto name : {CodeName::uncoded, CodeName::golden, CodeName::silver, CodeName::tast3})
    CHECK(parse_code_name(to_string(name)) == name);
}

TEST_CASE("Golden codebook") {
  const auto rep = codebook_determinants(CodeSpec::make(CodeName::golden));
  CHECK(rep.codewords == 256);
  CHECK(rep.distinct_codewords == 256);
  CHECK(std::abs(rep.energy_per_use - 2.0) < 1e-9);
  CHECK(std::abs(rep.min_determinant - 0.2) < 1e-9);
  CHECK(std::abs(rep.min_abs_det - 2.0 / std::sqrt(5.0)) < 1e-9);

  // alpha = 1 + i + i theta carries three times the energy and loses the 1/5.
  const auto printed = codebook_determinants(CodeSpec::make(CodeName::golden, 2, CodeVariant::printed));
  CHECK(printed.distinct_codewords == 256);
  CHECK(printed.energy_per_use == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(std::abs(printed.min_determinant - 0.2) > 1e-3);
}

TEST_CASE("Silver codebook") {
  const auto rep = codebook_determinants(CodeSpec::make(CodeName::silver));
  CHECK(rep.distinct_codewords == 256);
  CHECK(std::abs(rep.energy_per_use - 2.0) < 1e-9);
  CHECK(std::abs(rep.min_determinant - 1.0 / 7.0) < 1e-9);

  const auto printed = codebook_determinants(CodeSpec::make(CodeName::silver, 2, CodeVariant::printed));
  CHECK(printed.energy_per_use == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(printed.min_determinant == doctest::Approx(4.0 / 7.0).epsilon(1e-9));

  // No (s3, s4) part: the Alamouti block, orthogonal columns.
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto s = random_complex(2, rng);
    const Eigen::Matrix2cd x = silver_encode({s[0], s[1], 0.0, 0.0}, CodeVariant::printed);
    CHECK(x(0, 0) == s[0]);
    CHECK(x(1, 0) == s[1]);
    CHECK(x(0, 1) == -std::conj(s[1]));
    CHECK(x(1, 1) == std::conj(s[0]));
    const Eigen::Matrix2cd g = x.adjoint() * x;
    const double e = std::norm(s[0]) + std::norm(s[1]);
    CHECK((g - e * Eigen::Matrix2cd::Identity()).norm() < 1e-12 * e);
  }
}

TEST_CASE("TAST 3x3") {
  const auto spec = CodeSpec::make(CodeName::tast3);
  const cplx s = qpsk::points()[2];
  std::array<cplx, 9> all;
  all.fill(s);
  const auto x = tast3_encode(all);
  const cplx theta = std::polar(1.0, std::numbers::pi / 9.0);
  CHECK(std::abs(x(0, 0) - s * (1.0 + theta + theta * theta) / std::sqrt(3.0)) < 1e-14);

  const auto probe = sampled_determinants(spec, 100000, 5);
  CHECK(probe.distinct_codewords == 100000);
  CHECK(probe.min_abs_det > 0.0);
  CHECK(probe.energy_per_use == doctest::Approx(3.0).epsilon(0.01));

  // phi = exp(i pi/12) gives phi^2 theta^3 = i, so two symbol differences
  // can cancel in the determinant. Standard phi keeps it non-zero.
  std::array<cplx, 9> a, b;
  a.fill(qpsk::points()[0]);
  b = a;
  a[0] = cplx(-qpsk::kLevel, qpsk::kLevel);
  b[0] = cplx(qpsk::kLevel, qpsk::kLevel);  // s1 - s1' = -sqrt 2
  a[7] = cplx(qpsk::kLevel, qpsk::kLevel);
  b[7] = cplx(qpsk::kLevel, -qpsk::kLevel);  // s8 - s8' = i sqrt 2
  const auto printed_diff = tast3_encode(a, CodeVariant::printed) - tast3_encode(b, CodeVariant::printed);
  CHECK(std::abs(printed_diff.determinant()) < 1e-12);
  CHECK(printed_diff.norm() > 1.0);
  const auto standard_diff = tast3_encode(a) - tast3_encode(b);
  CHECK(std::abs(standard_diff.determinant()) > 1e-3);
}

TEST_CASE("encoders are real-linear") {
  std::mt19937_64 rng(6);
  for (auto name : {CodeName::uncoded, CodeName::golden, CodeName::silver, CodeName::tast3})
    for (auto variant : {CodeVariant::standard, CodeVariant::printed}) {
      const auto spec = CodeSpec::make(name, 0, variant);
      const auto s = random_complex(spec.symbols, rng), t = random_complex(spec.symbols, rng);
      const double a = 0.7, b = -1.9;
      std::vector<cplx> mix(s.size());
      for (std::size_t k = 0; k < s.size(); ++k) mix[k] = a * s[k] + b * t[k];
      const Eigen::MatrixXcd lhs = encode(spec, mix);
      const Eigen::MatrixXcd rhs = a * encode(spec, s) + b * encode(spec, t);
      CHECK((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }
  CHECK_THROWS_AS(encode(CodeSpec::make(CodeName::golden), std::vector<cplx>(3)), std::invalid_argument);
}

TEST_CASE("equivalent channel agrees with direct multiplication") {
  CHECK(equivalent_channel(Eigen::MatrixXcd::Identity(2, 2), CodeSpec::make(CodeName::uncoded, 2)) ==
        Eigen::MatrixXd::Identity(4, 4));

  std::mt19937_64 rng(7);
  for (auto name : {CodeName::uncoded, CodeName::golden, CodeName::silver, CodeName::tast3}) {
    const auto spec = CodeSpec::make(name, name == CodeName::uncoded ? 3 : 0);
    for (int t = 0; t < 100; ++t) {
      const auto h = random_matrix(spec.modes, rng);
      const auto g = equivalent_channel(h, spec);
      REQUIRE(g.rows() == 2 * spec.modes * spec.channel_uses);
      REQUIRE(g.cols() == spec.real_dimension());
      const auto s = random_qpsk(spec.symbols, rng);
      const Eigen::VectorXd direct = stack_observation(h * encode(spec, s));
      CHECK((direct - g * real_symbols(s)).norm() < 1e-12);
    }
  }
  CHECK_THROWS_AS(equivalent_channel(Eigen::MatrixXcd::Identity(3, 3), CodeSpec::make(CodeName::golden)),
                  std::invalid_argument);
}

}  // TEST_SUITE
