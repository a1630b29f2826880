#pragma once

#include "oamfso/stcode.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace oamfso {

/// Real-valued form of y = H s + n.
struct RealSystem {
  Eigen::MatrixXd generator;   // [Re H, -Im H; Im H, Re H]
  Eigen::VectorXd observation; // [Re y; Im y]
};

RealSystem complex_to_real(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y);
/// Inverse of complex_to_real for the observation / symbol vectors.
Eigen::VectorXcd real_to_complex(const Eigen::VectorXd& v);

/// Stacks an M x T block into [Re vec(Y); Im vec(Y)], channel use major.
Eigen::VectorXd stack_observation(const Eigen::MatrixXcd& y);

/// Both decoders search the per-coordinate alphabet {-1/sqrt2, +1/sqrt2}.
/// Among candidates whose metrics agree within kMetricTolerance (relative),
/// the lexicographically smallest real vector wins, with -1/sqrt2 < +1/sqrt2.
inline constexpr double kMetricTolerance = 1e-9;

struct DecodeResult {
  std::vector<cplx> symbols;
  /// ||y - G s||^2, evaluated directly on the returned point.
  double metric = 0.0;
  /// Tree nodes inside the search radius (sphere decoder) or candidates
  /// evaluated (exhaustive).
  std::uint64_t nodes = 0;
  /// Complete candidate vectors whose metric was evaluated.
  std::uint64_t leaves = 0;
};

/// Brute force over all 2^K real vectors. Throws std::invalid_argument when
/// 2^K > 2^24; use sphere decoding instead.
DecodeResult ml_exhaustive_real(const Eigen::MatrixXd& generator, const Eigen::VectorXd& observation);

/// Schnorr-Euchner depth-first sphere decoder on a sorted QR factorization of
/// the generator. Preprocessing happens once per generator; decode() can be
/// called for many observations. ML-exact.
class SphereDecoder {
 public:
  /// Throws std::invalid_argument if the generator is rank deficient.
  explicit SphereDecoder(const Eigen::MatrixXd& generator);

  DecodeResult decode(const Eigen::VectorXd& observation) const;
  int dimension() const noexcept { return static_cast<int>(order_.size()); }

 private:
  Eigen::MatrixXd generator_;
  Eigen::MatrixXd r_;             // upper triangular, columns permuted
  Eigen::MatrixXd qt_;            // Q^T
  std::vector<int> order_;        // r_ column c <-> original coordinate order_[c]
};

/// Joint ML detection of one codeword. `y` is the M x T received block.
DecodeResult ml_exhaustive(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& h, const CodeSpec& spec);
DecodeResult sphere_decode(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& h, const CodeSpec& spec);

}  // namespace oamfso
