#pragma once

#include "oamfso/propagation.hpp"
#include "oamfso/turbulence.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

namespace oamfso {

/// What produced an ensemble. Stored in the bank header (cn2, z, seed,
/// placement); grid and screen count travel in the run manifest.
struct EnsembleFingerprint {
  double cn2 = 0.0;
  double z = 0.0;
  std::uint64_t master_seed = 0;
  Placement placement = Placement::slab_end;
};

/// Channel realizations over one fixed, ordered set of charges (p = 0).
struct ChannelEnsemble {
  EnsembleFingerprint fingerprint;
  std::vector<int> charges;
  std::vector<Eigen::MatrixXcd> realizations;

  int mode_count() const noexcept { return static_cast<int>(charges.size()); }
  std::size_t size() const noexcept { return realizations.size(); }
};

struct BankConfig {
  std::vector<int> charges;
  LinkParams link;
  TurbulenceParams turbulence;
  int screens = 20;
  int realizations = 1000;
  std::uint64_t master_seed = 1;
  int threads = 1;
};

/// Master seed of realization r's screen stack.
std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t r);

/// Runs the split-step physics for every realization. The output depends
/// only on the config, never on `threads`. `progress` is called with the
/// number of finished realizations (from worker threads, unordered).
ChannelEnsemble generate_channel_bank(const BankConfig& config,
                                      const std::function<void(std::size_t)>& progress = {});

/// "OAMH" bank file: magic, u32 M, i32 charges[M], u32 count, f64 cn2, f64 z,
/// u64 master_seed, u8 placement, then count M x M complex f64 matrices in
/// column-major order, little-endian throughout.
void write_channel_bank(const std::filesystem::path& path, const ChannelEnsemble& bank);
/// Throws std::runtime_error naming the failed header check.
ChannelEnsemble read_channel_bank(const std::filesystem::path& path);

}  // namespace oamfso
