#pragma once

#include "oamfso/fft.hpp"
#include "oamfso/fieldgrid.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace oamfso {

/// How the outer scale enters the spectrum denominator.
enum class OuterScaleForm {
  /// (kappa^2 + 1/L0^2)^(11/6), the dimensionally consistent von Karman form.
  inverse_square,
  /// (kappa^2 + 1/L0)^(11/6), kept only for comparison runs.
  inverse_linear,
};

struct TurbulenceParams {
  double cn2 = 1e-14;        // m^(-2/3)
  double inner_scale = 5e-3; // l0, m
  double outer_scale = 20.0; // L0, m
  OuterScaleForm outer_form = OuterScaleForm::inverse_square;

  void validate() const;
  double kappa_l() const noexcept { return 3.3 / inner_scale; }
};

/// Modified Kolmogorov refractive-index spectrum Phi_n(kappa), m^3.
double spectrum_phi(double kappa, const TurbulenceParams& params);

enum class TurbulenceRegime { weak, strong };

struct RytovResult {
  double variance = 0.0;
  TurbulenceRegime regime = TurbulenceRegime::weak;
  /// variance == 1 exactly; classified strong since weak requires < 1.
  bool on_boundary = false;
};

/// sigma_R^2 = 1.23 Cn^2 k^(7/6) z^(11/6).
RytovResult rytov_variance(const TurbulenceParams& params, double wavelength, double z);

/// Thin-screen scaling: a screen represents a slab of the given thickness at
/// the given wavelength. Its phase spectrum is 2 pi k^2 dz Phi_n(kappa).
struct ScreenOptics {
  double wavelength = 1550e-9;
  double slab_thickness = 50.0;
};

struct PhaseScreen {
  GridSpec grid;
  std::vector<double> phase;  // radians, row-major n x n
};

/// FFT phase-screen synthesis with a cached spectral filter and workspace.
/// Not thread-safe; use one generator per worker.
class ScreenGenerator {
 public:
  ScreenGenerator(const GridSpec& grid, const TurbulenceParams& params, const ScreenOptics& optics);

  /// Draws one screen. Deterministic in `seed`.
  PhaseScreen generate(std::uint64_t seed);

  const GridSpec& grid() const noexcept { return grid_; }
  /// Per-bin standard deviation scale, dkappa * sqrt(Phi_phase(kappa)); DC is zero.
  const std::vector<double>& filter() const noexcept { return filter_; }

 private:
  GridSpec grid_;
  std::vector<double> filter_;
  Fft2d fft_;
};

PhaseScreen gen_phase_screen(const GridSpec& grid, const TurbulenceParams& params,
                             const ScreenOptics& optics, std::uint64_t seed);

/// Where each screen sits inside its slab.
enum class Placement : std::uint8_t {
  /// Screen j at z = (j+1) * spacing: vacuum step, then screen.
  slab_end = 0,
  /// Screen j at z = (j+1/2) * spacing: half step, screen, half step.
  slab_center = 1,
};

/// Ordered slabs of equal thickness along the path. `screens` is either empty
/// (vacuum path with the same slab structure) or holds one screen per slab.
struct ScreenStack {
  double spacing = 50.0;
  int slab_count = 20;
  std::vector<PhaseScreen> screens;

  double path_length() const noexcept { return spacing * slab_count; }
  bool is_vacuum() const noexcept { return screens.empty(); }
  /// Screen plane positions under a placement convention.
  std::vector<double> positions(Placement placement) const;

  static ScreenStack vacuum(double z_total, int slab_count);
};

/// Seed of screen j in a stack of `count` screens drawn from `master_seed`.
std::uint64_t screen_seed(std::uint64_t master_seed, int count, int index);

/// `count` independent screens over z_total. Throws std::invalid_argument when
/// count < 1 or z_total is not an integer multiple of the implied spacing.
ScreenStack gen_screen_stack(const GridSpec& grid, const TurbulenceParams& params,
                             double wavelength, double z_total, int count,
                             std::uint64_t master_seed);

/// Same as gen_screen_stack but reuses a generator whose optics must match
/// the slab thickness z_total / count.
ScreenStack gen_screen_stack(ScreenGenerator& generator, double z_total, int count,
                             std::uint64_t master_seed);

/// Screen bank ("OAMS") file.
struct ScreenBank {
  GridSpec grid;
  double spacing = 50.0;
  std::uint64_t master_seed = 0;
  TurbulenceParams params;
  std::vector<PhaseScreen> screens;
};

void write_screen_bank(const std::filesystem::path& path, const ScreenBank& bank);
ScreenBank read_screen_bank(const std::filesystem::path& path);

}  // namespace oamfso
