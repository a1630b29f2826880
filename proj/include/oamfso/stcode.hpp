#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oamfso {

using cplx = std::complex<double>;

/// Gray-mapped QPSK with unit average energy. Bit pair (b0, b1) maps to
/// ((1 - 2 b0) + i (1 - 2 b1)) / sqrt(2): 00 -> (+1+i)/sqrt(2).
namespace qpsk {

inline constexpr double kLevel = 0.70710678118654752440;  // 1/sqrt(2)

/// Throws std::invalid_argument on an odd bit count.
std::vector<cplx> modulate(std::span<const std::uint8_t> bits);
/// Hard decision per quadrant.
std::vector<std::uint8_t> demap(std::span<const cplx> symbols);
/// The four points in bit-label order 00, 01, 10, 11.
std::array<cplx, 4> points();

}  // namespace qpsk

enum class CodeName { uncoded, golden, silver, tast3 };

std::string_view to_string(CodeName name);
/// Throws std::invalid_argument for an unknown name.
CodeName parse_code_name(std::string_view name);

/// Which constants an encoder uses.
///
/// `standard` is the default: Golden with alpha = 1 + i - i theta, Silver
/// scaled by 1/sqrt(2), and TAST 3x3 with the transcendental thread unit
/// phi = exp(i/2). All three then carry M units of energy per channel use and
/// are full-diversity over QPSK. `printed` keeps alpha = 1 + i + i theta, the
/// unscaled Silver sum and phi = exp(i pi/12) for comparison runs.
enum class CodeVariant { standard, printed };

struct CodeSpec {
  CodeName name = CodeName::uncoded;
  int modes = 2;             // M
  int channel_uses = 1;      // T
  int symbols = 2;           // QPSK symbols per codeword
  CodeVariant variant = CodeVariant::standard;

  int bits_per_codeword() const noexcept { return 2 * symbols; }
  int real_dimension() const noexcept { return 2 * symbols; }

  /// uncoded: any M >= 1, T = 1; golden/silver: M = 2; tast3: M = 3.
  static CodeSpec make(CodeName name, int modes = 0, CodeVariant variant = CodeVariant::standard);
};

/// X = (1/sqrt 5) [a(s1 + t s2), a(s3 + t s4); i a'(s3 + t' s4), a'(s1 + t' s2)]
Eigen::Matrix2cd golden_encode(const std::array<cplx, 4>& s, CodeVariant variant = CodeVariant::standard);
/// X = X1(s1, s2) + diag(1, -1) X1(z1, z2), X1(a, b) = [a, -b*; b, a*],
/// with (z1, z2) the 1/sqrt(7) unitary mix of (s3, s4).
Eigen::Matrix2cd silver_encode(const std::array<cplx, 4>& s, CodeVariant variant = CodeVariant::standard);
/// Three-thread algebraic code, 1/sqrt(3) prefactor, threads scaled by 1,
/// phi^(1/3), phi^(2/3).
Eigen::Matrix3cd tast3_encode(const std::array<cplx, 9>& s, CodeVariant variant = CodeVariant::standard);

/// M x T codeword. Throws std::invalid_argument unless symbols.size() == spec.symbols.
Eigen::MatrixXcd encode(const CodeSpec& spec, std::span<const cplx> symbols);

/// Real generator G (2MT x 2K) with [Re vec(HX); Im vec(HX)] = G [Re s; Im s],
/// vec stacking channel uses. H is held fixed over the T uses.
Eigen::MatrixXd equivalent_channel(const Eigen::MatrixXcd& h, const CodeSpec& spec);

struct DeterminantReport {
  /// min |det(X - X')| over distinct codewords with unit-energy QPSK.
  double min_abs_det = 0.0;
  /// min |det(X - X')|^2 / d^(2M), d the QPSK minimum distance: the minimum
  /// determinant of the code over the unit-spaced symbol lattice.
  double min_determinant = 0.0;
  /// Average sum |X_ij|^2 / T over the codebook.
  double energy_per_use = 0.0;
  std::size_t codewords = 0;
  std::size_t distinct_codewords = 0;
};

/// Exhaustive over the full QPSK codebook (Golden, Silver: 256 codewords).
/// Throws std::invalid_argument when the codebook exceeds 2^16 codewords.
DeterminantReport codebook_determinants(const CodeSpec& spec);

/// Random-pair probe for codebooks too large to enumerate: `pairs` draws of
/// two distinct QPSK symbol vectors. distinct_codewords counts pairs whose
/// codewords differ.
DeterminantReport sampled_determinants(const CodeSpec& spec, std::size_t pairs, std::uint64_t seed);

}  // namespace oamfso
