#pragma once

#include "oamfso/channel_analysis.hpp"
#include "oamfso/channel_bank.hpp"
#include "oamfso/stcode.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace oamfso {

/// Scales every realization by one constant c so that the ensemble mean of
/// ||H||_F^2 / M is 1. Returns c. Relative fading and MDL are unchanged.
double normalize_ensemble(std::vector<Eigen::MatrixXcd>& realizations);
double normalize_ensemble(ChannelEnsemble& ensemble);

/// Adds circular complex Gaussian noise, variance n0 per complex dimension.
void awgn(std::span<cplx> symbols, double n0, std::uint64_t seed);

struct SimConfig {
  std::vector<double> snr_db;
  std::uint64_t min_bit_errors = 100;
  /// Per-point cap on simulated bits; reaching it without min_bit_errors
  /// flags the point as capped.
  std::uint64_t max_bits = 10'000'000;
  CodeSpec code = CodeSpec::make(CodeName::uncoded, 2);
  /// Realizations restricted to the chosen mode set and normalized. Empty
  /// means the identity channel.
  std::vector<Eigen::MatrixXcd> channels;
  std::uint64_t master_seed = 1;
  /// Codewords per committed batch. The stopping rule is checked only on
  /// whole batches, in batch order, so worker count never changes results.
  int batch_codewords = 1000;
  int threads = 1;
  /// Keep the sphere-decoder node count of every committed codeword.
  bool record_nodes = false;

  /// Single-point runs do not need the SNR grid.
  void validate(bool require_grid = true) const;
};

struct BerPoint {
  double snr_db = 0.0;
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;
  double ber = 0.0;
  /// Standard error of ber from the spread of per-codeword error counts.
  /// Bit errors cluster within codewords, so this exceeds ber / sqrt(errors).
  double ber_stderr = 0.0;
  std::uint64_t codewords = 0;
  bool capped = false;
  double wall_seconds = 0.0;
  /// Mean sphere-decoder tree nodes per codeword.
  double mean_nodes = 0.0;
  /// Codewords decoded by exhaustive fallback because the lattice was rank deficient.
  std::uint64_t fallback_decodes = 0;
  /// Per-codeword node counts in codeword order; filled when record_nodes is set.
  std::vector<std::uint32_t> node_log;
};

/// Seed of batch b at sweep point `point`.
std::uint64_t batch_seed(std::uint64_t master_seed, std::size_t point, std::uint64_t batch);

/// Monte Carlo at one SNR (Es/N0 with Es = 1). Codeword c uses channel
/// realization c mod |channels|.
BerPoint run_ber_point(const SimConfig& cfg, double snr_db, std::size_t point_index = 0);

std::vector<BerPoint> run_sweep(const SimConfig& cfg);

/// Columns snr_db,bits,errors,ber,codewords,capped.
void write_ber_csv(std::ostream& os, const std::vector<BerPoint>& points);

/// Columns snr_db,codeword,nodes from each point's node_log.
void write_node_csv(std::ostream& os, const std::vector<BerPoint>& points);

/// Restricts a bank to `modes` and applies normalize_ensemble. Returns the
/// realizations and stores the scale factor in `scale` when non-null.
std::vector<Eigen::MatrixXcd> prepare_channels(const ChannelEnsemble& bank, const ModeSet& modes,
                                               double* scale = nullptr);

}  // namespace oamfso
