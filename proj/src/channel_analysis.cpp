#include "oamfso/channel_analysis.hpp"

#include "oamfso/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <optional>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace oamfso {

ModeSet::ModeSet(std::vector<int> charges) : charges_(std::move(charges)) {
  std::sort(charges_.begin(), charges_.end());
  if (std::adjacent_find(charges_.begin(), charges_.end()) != charges_.end())
    throw std::invalid_argument("ModeSet: charges must be distinct");
}

std::ostream& operator<<(std::ostream& os, const ModeSet& set) {
  os << '{';
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) os << ',';
    const int c = set.charges()[i];
    if (c > 0) os << '+';
    os << c;
  }
  return os << '}';
}

MdlValue mdl_db(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols() || h.rows() == 0) throw std::invalid_argument("mdl_db: H must be square and non-empty");
  const Eigen::VectorXd sv = h.jacobiSvd().singularValues();
  const double smax = sv.maxCoeff();
  const double smin = sv.minCoeff();
  if (!(smax > 0.0) || !(smin > 1e-12 * smax)) return {std::numeric_limits<double>::infinity(), true};
  return {20.0 * std::log10(smax / smin), false};
}

std::vector<int> subset_indices(const std::vector<int>& charges, const ModeSet& subset) {
  std::vector<int> idx;
  idx.reserve(subset.size());
  for (int c : subset.charges()) {
    const auto it = std::find(charges.begin(), charges.end(), c);
    if (it == charges.end()) throw std::invalid_argument("submatrix: charge " + std::to_string(c) + " is not in the candidate set");
    idx.push_back(static_cast<int>(it - charges.begin()));
  }
  return idx;
}

namespace {

Eigen::MatrixXcd select(const Eigen::MatrixXcd& h, const std::vector<int>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd out(k, k);
  for (Eigen::Index q = 0; q < k; ++q)
    for (Eigen::Index p = 0; p < k; ++p) out(p, q) = h(idx[p], idx[q]);
  return out;
}

MdlStats mdl_stats_indices(const ChannelEnsemble& ensemble, const std::vector<int>& idx) {
  MdlStats st;
  double sum = 0.0, sum2 = 0.0;
  Eigen::MatrixXcd sub(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
  for (const auto& h : ensemble.realizations) {
    for (std::size_t q = 0; q < idx.size(); ++q)
      for (std::size_t p = 0; p < idx.size(); ++p) sub(p, q) = h(idx[p], idx[q]);
    const MdlValue v = mdl_db(sub);
    if (v.rank_deficient) {
      ++st.excluded;
      continue;
    }
    ++st.used;
    sum += v.db;
    sum2 += v.db * v.db;
  }
  if (st.used == 0) {
    st.mean_db = std::numeric_limits<double>::infinity();
    return st;
  }
  const double n = static_cast<double>(st.used);
  st.mean_db = sum / n;
  if (st.used > 1) {
    const double var = std::max(0.0, (sum2 - n * st.mean_db * st.mean_db) / (n - 1.0));
    st.stderr_db = std::sqrt(var / n);
  }
  return st;
}

double crosstalk_indices(const ChannelEnsemble& ensemble, const std::vector<int>& idx) {
  double acc = 0.0;
  for (const auto& h : ensemble.realizations) {
    double total = 0.0, off = 0.0;
    for (std::size_t q = 0; q < idx.size(); ++q)
      for (std::size_t p = 0; p < idx.size(); ++p) {
        const double pw = std::norm(h(idx[p], idx[q]));
        total += pw;
        if (p != q) off += pw;
      }
    acc += total > 0.0 ? off / total : 0.0;
  }
  return acc / static_cast<double>(ensemble.size());
}

void require_nonempty(const ChannelEnsemble& ensemble) {
  if (ensemble.realizations.empty()) throw std::invalid_argument("ensemble is empty");
}

}  // namespace

Eigen::MatrixXcd submatrix(const Eigen::MatrixXcd& h, const std::vector<int>& charges,
                           const ModeSet& subset) {
  if (h.rows() != static_cast<Eigen::Index>(charges.size()) || h.cols() != h.rows())
    throw std::invalid_argument("submatrix: matrix size does not match the charge list");
  return select(h, subset_indices(charges, subset));
}

ChannelMatrix submatrix(const ChannelMatrix& h, const ModeSet& subset) {
  std::vector<int> charges;
  for (const auto& m : h.modes) charges.push_back(m.m);
  const auto idx = subset_indices(charges, subset);
  ChannelMatrix out;
  for (int i : idx) out.modes.push_back(h.modes[static_cast<std::size_t>(i)]);
  out.h = select(h.h, idx);
  return out;
}

MdlStats average_mdl(const ChannelEnsemble& ensemble, const ModeSet& subset) {
  require_nonempty(ensemble);
  return mdl_stats_indices(ensemble, subset_indices(ensemble.charges, subset));
}

double mean_crosstalk(const ChannelEnsemble& ensemble, const ModeSet& subset) {
  require_nonempty(ensemble);
  return crosstalk_indices(ensemble, subset_indices(ensemble.charges, subset));
}

ModeSelection select_modes(const ChannelEnsemble& ensemble, int m, int threads) {
  require_nonempty(ensemble);
  const int n = ensemble.mode_count();
  if (m < 1 || m > n) throw std::invalid_argument("select_modes: M must lie in [1, |S|]");

  // All size-m index combinations in lexicographic order.
  std::vector<std::vector<int>> combos;
  std::vector<int> c(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) c[i] = i;
  for (;;) {
    combos.push_back(c);
    int i = m - 1;
    while (i >= 0 && c[i] == n - m + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < m; ++j) c[j] = c[j - 1] + 1;
  }

  std::vector<MdlStats> stats(combos.size());
  parallel_for(combos.size(), threads,
               [&](std::size_t, std::size_t k) { stats[k] = mdl_stats_indices(ensemble, combos[k]); });

  double best_mean = std::numeric_limits<double>::infinity();
  for (const auto& s : stats) best_mean = std::min(best_mean, s.mean_db);

  // Total order among exact ties: crosstalk, then charge list.
  std::optional<ModeSelection> best;
  for (std::size_t k = 0; k < combos.size(); ++k) {
    if (!(stats[k].mean_db == best_mean)) continue;
    std::vector<int> charges;
    for (int i : combos[k]) charges.push_back(ensemble.charges[static_cast<std::size_t>(i)]);
    ModeSelection cand{ModeSet(std::move(charges)), stats[k], crosstalk_indices(ensemble, combos[k]),
                       combos.size()};
    if (!best || cand.crosstalk < best->crosstalk ||
        (cand.crosstalk == best->crosstalk && cand.modes < best->modes))
      best = std::move(cand);
  }
  if (!best) throw std::runtime_error("select_modes: no subset has a finite average MDL");
  return *best;
}

Eigen::MatrixXd mdl_map(const ChannelEnsemble& ensemble, int threads, Eigen::MatrixXd* stderr_out) {
  require_nonempty(ensemble);
  const int n = ensemble.mode_count();
  Eigen::MatrixXd map = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  Eigen::MatrixXd err = map;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::vector<MdlStats> stats(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t, std::size_t k) {
    stats[k] = mdl_stats_indices(ensemble, {pairs[k].first, pairs[k].second});
  });
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    map(i, j) = map(j, i) = stats[k].mean_db;
    err(i, j) = err(j, i) = stats[k].stderr_db;
  }
  if (stderr_out) *stderr_out = err;
  return map;
}

void write_mdl_map_csv(std::ostream& os, const std::vector<int>& charges, const Eigen::MatrixXd& map) {
  os << "p";
  for (int c : charges) os << ',' << c;
  os << '\n';
  char buf[64];
  for (std::size_t i = 0; i < charges.size(); ++i) {
    os << charges[i];
    for (std::size_t j = 0; j < charges.size(); ++j) {
      const double v = map(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (std::isnan(v)) {
        os << ",nan";
      } else {
        std::snprintf(buf, sizeof buf, ",%.6f", v);
        os << buf;
      }
    }
    os << '\n';
  }
}

}  // namespace oamfso
