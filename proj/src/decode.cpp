#include "oamfso/decode.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace oamfso {

RealSystem complex_to_real(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y) {
  if (h.rows() != y.size()) throw std::invalid_argument("complex_to_real: H rows must match y length");
  const Eigen::Index m = h.rows(), n = h.cols();
  RealSystem sys{Eigen::MatrixXd(2 * m, 2 * n), Eigen::VectorXd(2 * m)};
  sys.generator.topLeftCorner(m, n) = h.real();
  sys.generator.topRightCorner(m, n) = -h.imag();
  sys.generator.bottomLeftCorner(m, n) = h.imag();
  sys.generator.bottomRightCorner(m, n) = h.real();
  sys.observation.head(m) = y.real();
  sys.observation.tail(m) = y.imag();
  return sys;
}

Eigen::VectorXcd real_to_complex(const Eigen::VectorXd& v) {
  if (v.size() % 2 != 0) throw std::invalid_argument("real_to_complex: length must be even");
  const Eigen::Index k = v.size() / 2;
  Eigen::VectorXcd out(k);
  for (Eigen::Index i = 0; i < k; ++i) out(i) = cplx(v(i), v(k + i));
  return out;
}

Eigen::VectorXd stack_observation(const Eigen::MatrixXcd& y) {
  const Eigen::Index rows = y.rows() * y.cols();
  Eigen::VectorXd out(2 * rows);
  for (Eigen::Index t = 0; t < y.cols(); ++t)
    for (Eigen::Index m = 0; m < y.rows(); ++m) {
      out(t * y.rows() + m) = y(m, t).real();
      out(rows + t * y.rows() + m) = y(m, t).imag();
    }
  return out;
}

namespace {

constexpr double kA = qpsk::kLevel;

double tolerance_for(double metric) { return kMetricTolerance * std::max(1.0, metric); }

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

/// Shared acceptance rule: strictly better beyond tolerance, or a tie within
/// tolerance that is lexicographically smaller.
bool improves(double metric, const Eigen::VectorXd& x, double best, const Eigen::VectorXd& best_x) {
  if (!std::isfinite(best)) return true;
  const double tol = tolerance_for(best);
  if (metric < best - tol) return true;
  return metric <= best + tol && lex_less(x, best_x);
}

DecodeResult to_result(const Eigen::VectorXd& x, double metric, std::uint64_t nodes, std::uint64_t leaves) {
  DecodeResult r;
  const Eigen::VectorXcd s = real_to_complex(x);
  r.symbols.assign(s.data(), s.data() + s.size());
  r.metric = metric;
  r.nodes = nodes;
  r.leaves = leaves;
  return r;
}

}  // namespace

DecodeResult ml_exhaustive_real(const Eigen::MatrixXd& g, const Eigen::VectorXd& y) {
  const Eigen::Index k = g.cols();
  if (g.rows() != y.size()) throw std::invalid_argument("ml_exhaustive: generator rows must match observation");
  if (k > 24)
    throw std::invalid_argument("ml_exhaustive: search space 2^" + std::to_string(k) +
                                " exceeds 2^24; use the sphere decoder");
  if (k % 2 != 0) throw std::invalid_argument("ml_exhaustive: real dimension must be even");

  // Gray-code walk with an incremental residual; accepted candidates are
  // re-evaluated directly.
  Eigen::VectorXd x = Eigen::VectorXd::Constant(k, -kA);
  Eigen::VectorXd residual = y - g * x;
  Eigen::VectorXd best_x = x;
  double best = std::numeric_limits<double>::infinity();
  const std::uint64_t total = std::uint64_t{1} << k;
  for (std::uint64_t step = 0; step < total; ++step) {
    if (step > 0) {
      const int c = std::countr_zero(step);
      const double delta = x(c) < 0 ? 2.0 * kA : -2.0 * kA;
      x(c) += delta;
      residual.noalias() -= g.col(c) * delta;
    }
    const double approx = residual.squaredNorm();
    if (std::isfinite(best) && approx > best + 2.0 * tolerance_for(best)) continue;
    const double metric = (y - g * x).squaredNorm();
    if (improves(metric, x, best, best_x)) {
      best = metric;
      best_x = x;
    }
  }
  return to_result(best_x, best, total, total);
}

SphereDecoder::SphereDecoder(const Eigen::MatrixXd& generator) : generator_(generator) {
  const Eigen::Index n = generator.rows(), k = generator.cols();
  if (k == 0 || n < k) throw std::invalid_argument("SphereDecoder: generator must have at least as many rows as columns");

  // Sorted QR: modified Gram-Schmidt taking the weakest remaining column
  // first, so the depth-first search starts from the strongest coordinates.
  Eigen::MatrixXd q = generator;
  r_ = Eigen::MatrixXd::Zero(k, k);
  order_.resize(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) order_[i] = static_cast<int>(i);
  Eigen::VectorXd norms = q.colwise().squaredNorm().transpose();
  const double scale = std::sqrt(norms.maxCoeff());
  for (Eigen::Index i = 0; i < k; ++i) {
    Eigen::Index pick = i;
    for (Eigen::Index l = i + 1; l < k; ++l)
      if (norms(l) < norms(pick)) pick = l;
    if (pick != i) {
      q.col(i).swap(q.col(pick));
      r_.col(i).swap(r_.col(pick));
      std::swap(order_[i], order_[pick]);
      std::swap(norms(i), norms(pick));
    }
    const double rii = q.col(i).norm();
    if (!(rii > 1e-12 * scale)) throw std::invalid_argument("SphereDecoder: generator is rank deficient");
    r_(i, i) = rii;
    q.col(i) /= rii;
    for (Eigen::Index l = i + 1; l < k; ++l) {
      const double ril = q.col(i).dot(q.col(l));
      r_(i, l) = ril;
      q.col(l) -= ril * q.col(i);
      norms(l) = q.col(l).squaredNorm();
    }
  }
  qt_ = q.transpose();
}

DecodeResult SphereDecoder::decode(const Eigen::VectorXd& y) const {
  const int k = dimension();
  if (y.size() != generator_.rows()) throw std::invalid_argument("SphereDecoder: observation length mismatch");
  const Eigen::VectorXd yt = qt_ * y;
  // Energy of y outside the column space; constant across candidates.
  const double offset = (y - qt_.transpose() * yt).squaredNorm();

  std::uint64_t nodes = 0, leaves = 0;
  Eigen::VectorXd best_x(k);  // original coordinate order
  double best = std::numeric_limits<double>::infinity();
  double radius = std::numeric_limits<double>::infinity();  // in QR domain

  Eigen::VectorXd xp(k);      // permuted coordinates
  Eigen::VectorXd cand(k);
  auto offer_leaf = [&]() {
    ++leaves;
    for (int c = 0; c < k; ++c) cand(order_[c]) = xp(c);
    const double metric = (y - generator_ * cand).squaredNorm();
    if (improves(metric, cand, best, best_x)) {
      best = metric;
      best_x = cand;
    }
    radius = best - offset + 2.0 * tolerance_for(best);
  };

  // Depth-first Schnorr-Euchner enumeration. With a two-level alphabet the
  // zig-zag order is simply nearest level, then the other one. The radius
  // starts unbounded, so the first leaf reached is the Babai point.
  std::vector<double> partial(static_cast<std::size_t>(k + 1), 0.0);
  std::vector<double> centers(static_cast<std::size_t>(k));
  std::vector<int> tried(static_cast<std::size_t>(k), 0);
  int c = k - 1;
  auto enter = [&](int level) {
    centers[level] = (yt(level) - r_.row(level).segment(level + 1, k - level - 1).dot(xp.segment(level + 1, k - level - 1))) /
                     r_(level, level);
    tried[level] = 0;
  };
  enter(c);
  while (c < k) {
    bool descended = false;
    while (tried[c] < 2) {
      const double nearest = centers[c] >= 0.0 ? kA : -kA;
      const double value = tried[c] == 0 ? nearest : -nearest;
      ++tried[c];
      const double diff = r_(c, c) * (value - centers[c]);
      const double d = partial[c + 1] + diff * diff;
      if (d > radius) {
        // Farther level is even worse.
        tried[c] = 2;
        break;
      }
      ++nodes;
      xp(c) = value;
      if (c == 0) {
        offer_leaf();
        continue;
      }
      partial[c] = d;
      --c;
      enter(c);
      descended = true;
      break;
    }
    if (!descended) ++c;
  }
  return to_result(best_x, best, nodes, leaves);
}

DecodeResult ml_exhaustive(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& h, const CodeSpec& spec) {
  return ml_exhaustive_real(equivalent_channel(h, spec), stack_observation(y));
}

DecodeResult sphere_decode(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& h, const CodeSpec& spec) {
  return SphereDecoder(equivalent_channel(h, spec)).decode(stack_observation(y));
}

}  // namespace oamfso
