#include "oamfso/turbulence.hpp"

#include "oamfso/binary_io.hpp"
#include "oamfso/seed.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

namespace oamfso {

void TurbulenceParams::validate() const {
  if (!(cn2 > 0.0) || !std::isfinite(cn2))
    throw std::invalid_argument("TurbulenceParams: cn2 must be positive");
  if (!(inner_scale > 0.0) || !(inner_scale < outer_scale) || !std::isfinite(outer_scale))
    throw std::invalid_argument("TurbulenceParams: require 0 < l0 < L0");
}

double spectrum_phi(double kappa, const TurbulenceParams& params) {
  if (kappa < 0.0) throw std::invalid_argument("spectrum_phi: kappa must be >= 0");
  const double kl = params.kappa_l();
  const double u = kappa / kl;
  const double k0 = params.outer_form == OuterScaleForm::inverse_square
                        ? 1.0 / (params.outer_scale * params.outer_scale)
                        : 1.0 / params.outer_scale;
  const double f = 1.0 + 1.802 * u - 0.254 * std::pow(u, 7.0 / 6.0);
  return 0.033 * params.cn2 * std::exp(-u * u) / std::pow(kappa * kappa + k0, 11.0 / 6.0) * f;
}

RytovResult rytov_variance(const TurbulenceParams& params, double wavelength, double z) {
  if (!(z > 0.0)) throw std::invalid_argument("rytov_variance: z must be positive");
  if (!(wavelength > 0.0)) throw std::invalid_argument("rytov_variance: wavelength must be positive");
  const double k = 2.0 * std::numbers::pi / wavelength;
  RytovResult r;
  r.variance = 1.23 * params.cn2 * std::pow(k, 7.0 / 6.0) * std::pow(z, 11.0 / 6.0);
  r.regime = r.variance < 1.0 ? TurbulenceRegime::weak : TurbulenceRegime::strong;
  r.on_boundary = r.variance == 1.0;
  return r;
}

ScreenGenerator::ScreenGenerator(const GridSpec& grid, const TurbulenceParams& params,
                                 const ScreenOptics& optics)
    : grid_(grid), filter_(grid.sample_count()), fft_((grid.validate(), grid.n)) {
  params.validate();
  if (!(optics.wavelength > 0.0) || !(optics.slab_thickness > 0.0))
    throw std::invalid_argument("ScreenOptics: wavelength and slab thickness must be positive");
  const int n = grid.n;
  const double dk = 2.0 * std::numbers::pi / (n * grid.dx);
  const double k = 2.0 * std::numbers::pi / optics.wavelength;
  const double phase_factor = 2.0 * std::numbers::pi * k * k * optics.slab_thickness;
  for (int row = 0; row < n; ++row) {
    const double ky = fft_frequency_index(row, n) * dk;
    for (int col = 0; col < n; ++col) {
      const double kx = fft_frequency_index(col, n) * dk;
      const double kappa = std::hypot(kx, ky);
      filter_[static_cast<std::size_t>(row) * n + col] =
          (row == 0 && col == 0) ? 0.0 : dk * std::sqrt(phase_factor * spectrum_phi(kappa, params));
    }
  }
}

PhaseScreen ScreenGenerator::generate(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto buf = fft_.data();
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    buf[i] = cplx(re, im) * filter_[i];
  }
  fft_.backward();
  PhaseScreen screen{grid_, std::vector<double>(buf.size())};
  for (std::size_t i = 0; i < buf.size(); ++i) screen.phase[i] = buf[i].real();
  return screen;
}

PhaseScreen gen_phase_screen(const GridSpec& grid, const TurbulenceParams& params,
                             const ScreenOptics& optics, std::uint64_t seed) {
  ScreenGenerator gen(grid, params, optics);
  return gen.generate(seed);
}

std::vector<double> ScreenStack::positions(Placement placement) const {
  std::vector<double> z(static_cast<std::size_t>(slab_count));
  const double offset = placement == Placement::slab_end ? 1.0 : 0.5;
  for (int j = 0; j < slab_count; ++j) z[j] = (j + offset) * spacing;
  return z;
}

ScreenStack ScreenStack::vacuum(double z_total, int slab_count) {
  if (slab_count < 1) throw std::invalid_argument("ScreenStack: slab_count must be >= 1");
  if (!(z_total > 0.0)) throw std::invalid_argument("ScreenStack: path length must be positive");
  return ScreenStack{z_total / slab_count, slab_count, {}};
}

std::uint64_t screen_seed(std::uint64_t master_seed, int count, int index) {
  return derive_seed(master_seed, {kScreenStackStream, static_cast<std::uint64_t>(count),
                                   static_cast<std::uint64_t>(index)});
}

namespace {

double checked_spacing(double z_total, int count) {
  if (count < 1) throw std::invalid_argument("gen_screen_stack: count must be >= 1");
  if (!(z_total > 0.0)) throw std::invalid_argument("gen_screen_stack: z_total must be positive");
  // Slabs must be a whole number of millimetres.
  const double spacing_mm = z_total * 1e3 / count;
  if (std::abs(spacing_mm - std::round(spacing_mm)) > 1e-6)
    throw std::invalid_argument("gen_screen_stack: z_total is not divisible into equal slabs");
  return z_total / count;
}

}  // namespace

ScreenStack gen_screen_stack(ScreenGenerator& generator, double z_total, int count,
                             std::uint64_t master_seed) {
  ScreenStack stack{checked_spacing(z_total, count), count, {}};
  stack.screens.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) stack.screens.push_back(generator.generate(screen_seed(master_seed, count, j)));
  return stack;
}

ScreenStack gen_screen_stack(const GridSpec& grid, const TurbulenceParams& params,
                             double wavelength, double z_total, int count,
                             std::uint64_t master_seed) {
  const double spacing = checked_spacing(z_total, count);
  ScreenGenerator gen(grid, params, ScreenOptics{wavelength, spacing});
  return gen_screen_stack(gen, z_total, count, master_seed);
}

void write_screen_bank(const std::filesystem::path& path, const ScreenBank& bank) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  binio::put_magic(os, "OAMS");
  binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(bank.grid.n));
  binio::put<double>(os, bank.grid.dx);
  binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(bank.screens.size()));
  binio::put<double>(os, bank.spacing);
  binio::put<std::uint64_t>(os, bank.master_seed);
  binio::put<double>(os, bank.params.cn2);
  binio::put<double>(os, bank.params.inner_scale);
  binio::put<double>(os, bank.params.outer_scale);
  for (const auto& screen : bank.screens) {
    if (screen.grid != bank.grid) throw std::invalid_argument("write_screen_bank: grid mismatch");
    for (double v : screen.phase) binio::put<float>(os, static_cast<float>(v));
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

ScreenBank read_screen_bank(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  binio::expect_magic(is, "OAMS");
  ScreenBank bank;
  bank.grid.n = static_cast<int>(binio::get<std::uint32_t>(is, "grid size"));
  bank.grid.dx = binio::get<double>(is, "grid spacing");
  bank.grid.validate();
  const auto count = binio::get<std::uint32_t>(is, "screen count");
  bank.spacing = binio::get<double>(is, "screen spacing");
  bank.master_seed = binio::get<std::uint64_t>(is, "master seed");
  bank.params.cn2 = binio::get<double>(is, "cn2");
  bank.params.inner_scale = binio::get<double>(is, "inner scale");
  bank.params.outer_scale = binio::get<double>(is, "outer scale");
  bank.screens.resize(count);
  for (auto& screen : bank.screens) {
    screen.grid = bank.grid;
    screen.phase.resize(bank.grid.sample_count());
    for (double& v : screen.phase) v = binio::get<float>(is, "screen phases");
  }
  return bank;
}

}  // namespace oamfso
