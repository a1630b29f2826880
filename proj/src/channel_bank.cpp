#include "oamfso/channel_bank.hpp"

#include "oamfso/binary_io.hpp"
#include "oamfso/parallel.hpp"
#include "oamfso/seed.hpp"

#include <atomic>
#include <fstream>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>

namespace oamfso {

std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t r) {
  return derive_seed(master_seed, {kChannelBankStream, static_cast<std::uint64_t>(r)});
}

ChannelEnsemble generate_channel_bank(const BankConfig& config,
                                      const std::function<void(std::size_t)>& progress) {
  if (config.realizations < 1) throw std::invalid_argument("channel bank: realization count must be >= 1");
  if (config.screens < 1) throw std::invalid_argument("channel bank: screen count must be >= 1");
  config.link.validate();
  config.turbulence.validate();

  std::vector<ModeIndex> modes;
  for (int c : config.charges) modes.push_back({0, c});

  const double spacing = config.link.z_total / config.screens;
  const int workers = std::max(1, std::min(config.threads, config.realizations));
  struct Worker {
    ChannelSynthesizer synth;
    ScreenGenerator screens;
  };
  std::vector<std::unique_ptr<Worker>> pool(static_cast<std::size_t>(workers));
  const ScreenOptics optics{config.link.beam.wavelength(), spacing};

  ChannelEnsemble out;
  out.fingerprint = {config.turbulence.cn2, config.link.z_total, config.master_seed,
                     config.link.placement};
  out.charges = config.charges;
  out.realizations.resize(static_cast<std::size_t>(config.realizations));

  std::atomic<std::size_t> done{0};
  parallel_for(out.realizations.size(), workers, [&](std::size_t w, std::size_t r) {
    if (!pool[w]) {
      pool[w] = std::make_unique<Worker>(Worker{ChannelSynthesizer(modes, config.link),
                                                ScreenGenerator(config.link.grid, config.turbulence, optics)});
    }
    const ScreenStack stack = gen_screen_stack(pool[w]->screens, config.link.z_total, config.screens,
                                               realization_seed(config.master_seed, r));
    out.realizations[r] = pool[w]->synth.realize(stack).h;
    const std::size_t finished = ++done;
    if (progress) progress(finished);
  });
  return out;
}

void write_channel_bank(const std::filesystem::path& path, const ChannelEnsemble& bank) {
  const int m = bank.mode_count();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  binio::put_magic(os, "OAMH");
  binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(m));
  for (int c : bank.charges) binio::put<std::int32_t>(os, c);
  binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(bank.size()));
  binio::put<double>(os, bank.fingerprint.cn2);
  binio::put<double>(os, bank.fingerprint.z);
  binio::put<std::uint64_t>(os, bank.fingerprint.master_seed);
  binio::put<std::uint8_t>(os, static_cast<std::uint8_t>(bank.fingerprint.placement));
  for (const auto& h : bank.realizations) {
    if (h.rows() != m || h.cols() != m) throw std::invalid_argument("write_channel_bank: matrix size mismatch");
    for (int q = 0; q < m; ++q)
      for (int p = 0; p < m; ++p) {
        binio::put<double>(os, h(p, q).real());
        binio::put<double>(os, h(p, q).imag());
      }
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

ChannelEnsemble read_channel_bank(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open channel bank " + path.string());
  binio::expect_magic(is, "OAMH");
  ChannelEnsemble bank;
  const auto m = binio::get<std::uint32_t>(is, "mode count");
  if (m < 1 || m > 1024) throw std::runtime_error("header check failed: mode count " + std::to_string(m));
  for (std::uint32_t i = 0; i < m; ++i) bank.charges.push_back(binio::get<std::int32_t>(is, "mode charges"));
  if (std::set<int>(bank.charges.begin(), bank.charges.end()).size() != bank.charges.size())
    throw std::runtime_error("header check failed: duplicate mode charges");
  const auto count = binio::get<std::uint32_t>(is, "realization count");
  if (count < 1) throw std::runtime_error("header check failed: realization count is zero");
  bank.fingerprint.cn2 = binio::get<double>(is, "cn2");
  bank.fingerprint.z = binio::get<double>(is, "path length");
  bank.fingerprint.master_seed = binio::get<std::uint64_t>(is, "master seed");
  const auto placement = binio::get<std::uint8_t>(is, "placement");
  if (placement > 1) throw std::runtime_error("header check failed: unknown placement convention");
  bank.fingerprint.placement = static_cast<Placement>(placement);

  bank.realizations.assign(count, Eigen::MatrixXcd(m, m));
  for (auto& h : bank.realizations)
    for (std::uint32_t q = 0; q < m; ++q)
      for (std::uint32_t p = 0; p < m; ++p) {
        const double re = binio::get<double>(is, "channel matrices");
        h(p, q) = cplx(re, binio::get<double>(is, "channel matrices"));
      }
  if (is.peek() != std::char_traits<char>::eof())
    throw std::runtime_error("header check failed: trailing bytes after declared realizations");
  return bank;
}

}  // namespace oamfso
