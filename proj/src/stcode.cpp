#include "oamfso/stcode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace oamfso {

namespace qpsk {

std::vector<cplx> modulate(std::span<const std::uint8_t> bits) {
  if (bits.size() % 2 != 0) throw std::invalid_argument("qpsk::modulate: bit count must be even");
  std::vector<cplx> out(bits.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double re = bits[2 * i] ? -kLevel : kLevel;
    const double im = bits[2 * i + 1] ? -kLevel : kLevel;
    out[i] = {re, im};
  }
  return out;
}

std::vector<std::uint8_t> demap(std::span<const cplx> symbols) {
  std::vector<std::uint8_t> bits(symbols.size() * 2);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    bits[2 * i] = symbols[i].real() < 0.0;
    bits[2 * i + 1] = symbols[i].imag() < 0.0;
  }
  return bits;
}

std::array<cplx, 4> points() {
  return {cplx(kLevel, kLevel), cplx(kLevel, -kLevel), cplx(-kLevel, kLevel), cplx(-kLevel, -kLevel)};
}

}  // namespace qpsk

std::string_view to_string(CodeName name) {
  switch (name) {
    case CodeName::uncoded: return "uncoded";
    case CodeName::golden: return "golden";
    case CodeName::silver: return "silver";
    case CodeName::tast3: return "tast3";
  }
  return "?";
}

CodeName parse_code_name(std::string_view name) {
  if (name == "uncoded") return CodeName::uncoded;
  if (name == "golden") return CodeName::golden;
  if (name == "silver") return CodeName::silver;
  if (name == "tast3") return CodeName::tast3;
  throw std::invalid_argument("unknown code \"" + std::string(name) + "\" (expected uncoded|golden|silver|tast3)");
}

CodeSpec CodeSpec::make(CodeName name, int modes, CodeVariant variant) {
  switch (name) {
    case CodeName::uncoded: {
      const int m = modes == 0 ? 2 : modes;
      if (m < 1) throw std::invalid_argument("uncoded: M must be >= 1");
      return {name, m, 1, m, variant};
    }
    case CodeName::golden:
    case CodeName::silver:
      if (modes != 0 && modes != 2) throw std::invalid_argument(std::string(to_string(name)) + " code requires M = 2");
      return {name, 2, 2, 4, variant};
    case CodeName::tast3:
      if (modes != 0 && modes != 3) throw std::invalid_argument("tast3 code requires M = 3");
      return {name, 3, 3, 9, variant};
  }
  throw std::invalid_argument("unknown code");
}

Eigen::Matrix2cd golden_encode(const std::array<cplx, 4>& s, CodeVariant variant) {
  const double sqrt5 = std::sqrt(5.0);
  const double theta = (1.0 + sqrt5) / 2.0;
  const double theta_bar = (1.0 - sqrt5) / 2.0;
  const cplx i{0.0, 1.0};
  const double sign = variant == CodeVariant::standard ? -1.0 : 1.0;
  const cplx alpha = 1.0 + i + sign * i * theta;
  const cplx alpha_bar = 1.0 + i + sign * i * theta_bar;
  Eigen::Matrix2cd x;
  x(0, 0) = alpha * (s[0] + theta * s[1]);
  x(0, 1) = alpha * (s[2] + theta * s[3]);
  x(1, 0) = i * alpha_bar * (s[2] + theta_bar * s[3]);
  x(1, 1) = alpha_bar * (s[0] + theta_bar * s[1]);
  return x / sqrt5;
}

Eigen::Matrix2cd silver_encode(const std::array<cplx, 4>& s, CodeVariant variant) {
  const double inv_sqrt7 = 1.0 / std::sqrt(7.0);
  const cplx z1 = (cplx(1, 1) * s[2] + cplx(-1, 2) * s[3]) * inv_sqrt7;
  const cplx z2 = (cplx(1, 2) * s[2] + cplx(1, -1) * s[3]) * inv_sqrt7;
  Eigen::Matrix2cd x;
  x(0, 0) = s[0] + z1;
  x(0, 1) = -std::conj(s[1]) - std::conj(z2);
  x(1, 0) = s[1] - z2;
  x(1, 1) = std::conj(s[0]) - std::conj(z1);
  if (variant == CodeVariant::standard) x *= std::numbers::sqrt2 / 2.0;
  return x;
}

Eigen::Matrix3cd tast3_encode(const std::array<cplx, 9>& s, CodeVariant variant) {
  const cplx i{0.0, 1.0};
  const double phi_angle = variant == CodeVariant::standard ? 0.5 : std::numbers::pi / 12.0;
  const cplx phi13 = std::exp(i * (phi_angle / 3.0));
  const cplx phi23 = std::exp(i * (2.0 * phi_angle / 3.0));
  const cplx j = std::exp(i * (2.0 * std::numbers::pi / 3.0));
  const cplx j2 = j * j;
  const cplx th = std::exp(i * (std::numbers::pi / 9.0));
  const cplx th2 = th * th;

  // Thread t carries symbols (a, b, c); component k uses rotation j^k theta.
  auto comp = [&](const cplx& a, const cplx& b, const cplx& c, const cplx& r1, const cplx& r2) {
    return a + r1 * th * b + r2 * th2 * c;
  };
  const cplx one{1.0, 0.0};
  Eigen::Matrix3cd x;
  x(0, 0) = comp(s[0], s[1], s[2], one, one);
  x(1, 1) = comp(s[0], s[1], s[2], j, j2);
  x(2, 2) = comp(s[0], s[1], s[2], j2, j);
  x(1, 0) = phi13 * comp(s[3], s[4], s[5], one, one);
  x(2, 1) = phi13 * comp(s[3], s[4], s[5], j, j2);
  x(0, 2) = phi13 * comp(s[3], s[4], s[5], j2, j);
  x(2, 0) = phi23 * comp(s[6], s[7], s[8], one, one);
  x(0, 1) = phi23 * comp(s[6], s[7], s[8], j, j2);
  x(1, 2) = phi23 * comp(s[6], s[7], s[8], j2, j);
  return x / std::sqrt(3.0);
}

Eigen::MatrixXcd encode(const CodeSpec& spec, std::span<const cplx> symbols) {
  if (static_cast<int>(symbols.size()) != spec.symbols)
    throw std::invalid_argument("encode: expected " + std::to_string(spec.symbols) + " symbols, got " +
                                std::to_string(symbols.size()));
  switch (spec.name) {
    case CodeName::uncoded: {
      Eigen::MatrixXcd x(spec.modes, 1);
      for (int k = 0; k < spec.modes; ++k) x(k, 0) = symbols[k];
      return x;
    }
    case CodeName::golden:
      return golden_encode({symbols[0], symbols[1], symbols[2], symbols[3]}, spec.variant);
    case CodeName::silver:
      return silver_encode({symbols[0], symbols[1], symbols[2], symbols[3]}, spec.variant);
    case CodeName::tast3: {
      std::array<cplx, 9> s;
      std::copy(symbols.begin(), symbols.end(), s.begin());
      return tast3_encode(s, spec.variant);
    }
  }
  throw std::invalid_argument("encode: unknown code");
}

Eigen::MatrixXd equivalent_channel(const Eigen::MatrixXcd& h, const CodeSpec& spec) {
  if (h.rows() != spec.modes || h.cols() != spec.modes)
    throw std::invalid_argument("equivalent_channel: H is " + std::to_string(h.rows()) + "x" +
                                std::to_string(h.cols()) + " but the code needs M = " + std::to_string(spec.modes));
  const int k = spec.symbols;
  const int rows = spec.modes * spec.channel_uses;
  Eigen::MatrixXd g(2 * rows, 2 * k);
  std::vector<cplx> basis(static_cast<std::size_t>(k));
  // Encoders are real-linear, so column c of G is the response to unit
  // coordinate c of [Re s; Im s].
  for (int c = 0; c < 2 * k; ++c) {
    std::fill(basis.begin(), basis.end(), cplx{});
    basis[static_cast<std::size_t>(c % k)] = c < k ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
    const Eigen::MatrixXcd y = h * encode(spec, basis);
    for (int t = 0; t < spec.channel_uses; ++t)
      for (int m = 0; m < spec.modes; ++m) {
        const int r = t * spec.modes + m;
        g(r, c) = y(m, t).real();
        g(rows + r, c) = y(m, t).imag();
      }
  }
  return g;
}

DeterminantReport codebook_determinants(const CodeSpec& spec) {
  if (spec.modes != spec.channel_uses)
    throw std::invalid_argument("codebook_determinants: code matrices must be square");
  if (spec.symbols > 8) throw std::invalid_argument("codebook_determinants: codebook too large for exhaustive pairs");
  const std::size_t count = std::size_t{1} << (2 * spec.symbols);
  const auto pts = qpsk::points();

  std::vector<Eigen::MatrixXcd> book;
  book.reserve(count);
  std::vector<cplx> s(static_cast<std::size_t>(spec.symbols));
  double energy = 0.0;
  for (std::size_t idx = 0; idx < count; ++idx) {
    for (int k = 0; k < spec.symbols; ++k) s[k] = pts[(idx >> (2 * k)) & 3u];
    book.push_back(encode(spec, s));
    energy += book.back().squaredNorm();
  }

  DeterminantReport rep;
  rep.codewords = count;
  rep.energy_per_use = energy / static_cast<double>(count) / spec.channel_uses;
  rep.min_abs_det = std::numeric_limits<double>::infinity();
  std::size_t duplicates = 0;
  for (std::size_t a = 0; a < count; ++a) {
    bool duplicate = false;
    for (std::size_t b = a + 1; b < count; ++b) {
      const Eigen::MatrixXcd d = book[a] - book[b];
      if (d.norm() < 1e-12) duplicate = true;
      rep.min_abs_det = std::min(rep.min_abs_det, std::abs(d.determinant()));
    }
    duplicates += duplicate;
  }
  rep.distinct_codewords = count - duplicates;
  const double d2 = 4.0 * qpsk::kLevel * qpsk::kLevel;  // squared minimum distance
  rep.min_determinant = rep.min_abs_det * rep.min_abs_det / std::pow(d2, spec.modes);
  return rep;
}

DeterminantReport sampled_determinants(const CodeSpec& spec, std::size_t pairs, std::uint64_t seed) {
  if (spec.modes != spec.channel_uses)
    throw std::invalid_argument("sampled_determinants: code matrices must be square");
  const auto pts = qpsk::points();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 3);
  std::vector<cplx> a(static_cast<std::size_t>(spec.symbols)), b(a.size());
  DeterminantReport rep;
  rep.min_abs_det = std::numeric_limits<double>::infinity();
  double energy = 0.0;
  for (std::size_t t = 0; t < pairs; ++t) {
    bool same = true;
    do {
      same = true;
      for (std::size_t k = 0; k < a.size(); ++k) {
        a[k] = pts[pick(rng)];
        b[k] = pts[pick(rng)];
        same = same && a[k] == b[k];
      }
    } while (same);
    const Eigen::MatrixXcd xa = encode(spec, a);
    const Eigen::MatrixXcd d = xa - encode(spec, b);
    energy += xa.squaredNorm();
    rep.distinct_codewords += d.norm() > 1e-12;
    rep.min_abs_det = std::min(rep.min_abs_det, std::abs(d.determinant()));
  }
  rep.codewords = pairs;
  rep.energy_per_use = pairs ? energy / static_cast<double>(pairs) / spec.channel_uses : 0.0;
  const double d2 = 4.0 * qpsk::kLevel * qpsk::kLevel;
  rep.min_determinant = rep.min_abs_det * rep.min_abs_det / std::pow(d2, spec.modes);
  return rep;
}

}  // namespace oamfso
