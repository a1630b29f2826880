#pragma once

#include "oamfso/channel_bank.hpp"
#include "oamfso/propagation.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

namespace oamfso {

/// Sorted, distinct topological charges.
class ModeSet {
 public:
  ModeSet() = default;
  /// Sorts; throws std::invalid_argument on duplicates.
  explicit ModeSet(std::vector<int> charges);

  const std::vector<int>& charges() const noexcept { return charges_; }
  std::size_t size() const noexcept { return charges_.size(); }

  friend bool operator==(const ModeSet&, const ModeSet&) = default;
  friend auto operator<=>(const ModeSet&, const ModeSet&) = default;

 private:
  std::vector<int> charges_;
};

std::ostream& operator<<(std::ostream& os, const ModeSet& set);

struct MdlValue {
  double db = 0.0;
  /// Smallest singular value below 1e-12 of the largest; db is +inf then.
  bool rank_deficient = false;
};

/// 10 log10(lambda_max / lambda_min) over the eigenvalues of H^H H, i.e. the
/// squared singular values of H.
MdlValue mdl_db(const Eigen::MatrixXcd& h);
inline MdlValue mdl_db(const ChannelMatrix& h) { return mdl_db(h.h); }

/// Rows and columns of `subset`, in subset order. Throws std::invalid_argument
/// for a charge that is not among `charges`.
Eigen::MatrixXcd submatrix(const Eigen::MatrixXcd& h, const std::vector<int>& charges,
                           const ModeSet& subset);
ChannelMatrix submatrix(const ChannelMatrix& h, const ModeSet& subset);

/// Positions of `subset`'s charges within `charges`.
std::vector<int> subset_indices(const std::vector<int>& charges, const ModeSet& subset);

struct MdlStats {
  double mean_db = 0.0;
  double stderr_db = 0.0;
  std::size_t used = 0;
  /// Rank-deficient realizations left out of the mean.
  std::size_t excluded = 0;
};

MdlStats average_mdl(const ChannelEnsemble& ensemble, const ModeSet& subset);

/// Ensemble mean of the off-diagonal power fraction sum_{p!=q}|h|^2 / sum|h|^2.
double mean_crosstalk(const ChannelEnsemble& ensemble, const ModeSet& subset);

struct ModeSelection {
  ModeSet modes;
  MdlStats stats;
  double crosstalk = 0.0;
  std::size_t subsets_searched = 0;
};

/// Exhaustive search over every size-M subset of the ensemble's charges for
/// the smallest average MDL. Ties (equal mean MDL) go to the smaller mean
/// crosstalk, then to the lexicographically smaller charge list.
ModeSelection select_modes(const ChannelEnsemble& ensemble, int m, int threads = 1);

/// Pairwise average MDL: cell (i, j) is average_mdl over {c_i, c_j}; the
/// diagonal is NaN.
Eigen::MatrixXd mdl_map(const ChannelEnsemble& ensemble, int threads = 1,
                        Eigen::MatrixXd* stderr_out = nullptr);

/// CSV with header "p,<c_0>,...", one row per charge p.
void write_mdl_map_csv(std::ostream& os, const std::vector<int>& charges, const Eigen::MatrixXd& map);

}  // namespace oamfso
