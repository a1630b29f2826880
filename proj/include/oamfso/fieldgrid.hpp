#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <vector>

namespace oamfso {

using cplx = std::complex<double>;

/// Square sampling grid, identical spacing along x and y. Samples sit at cell
/// centers, (i - n/2 + 0.5) * dx, so no sample lands on the beam axis.
struct GridSpec {
  int n = 512;
  double dx = 5e-3;

  /// Throws std::invalid_argument unless n is a power of two and dx > 0.
  void validate() const;
  double half_width() const noexcept { return 0.5 * n * dx; }
  double coordinate(int i) const noexcept { return (i - n / 2 + 0.5) * dx; }
  std::size_t sample_count() const noexcept { return static_cast<std::size_t>(n) * n; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Transmit beam: waist and carrier wavelength. Rayleigh range and wavenumber
/// are always derived, never stored.
class BeamParams {
 public:
  BeamParams(double waist, double wavelength);

  double waist() const noexcept { return waist_; }
  double wavelength() const noexcept { return wavelength_; }
  double rayleigh_range() const noexcept;
  double wavenumber() const noexcept;
  /// w(z) = w0 sqrt(1 + (z/zR)^2)
  double radius_at(double z) const noexcept;

  friend bool operator==(const BeamParams&, const BeamParams&) = default;

 private:
  double waist_;
  double wavelength_;
};

struct ModeIndex {
  int p = 0;  // radial
  int m = 0;  // topological charge

  friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

/// Complex field sampled on a GridSpec at propagation distance z.
struct ScalarField {
  GridSpec grid;
  double z = 0.0;
  std::vector<cplx> samples;

  ScalarField() = default;
  ScalarField(const GridSpec& g, double plane_z);

  cplx& at(int row, int col) { return samples[static_cast<std::size_t>(row) * grid.n + col]; }
  const cplx& at(int row, int col) const {
    return samples[static_cast<std::size_t>(row) * grid.n + col];
  }
};

struct LgDiagnostics {
  /// Discrete power of the field built with the analytic prefactor. Ideally 1;
  /// the deviation measures grid truncation and sampling error.
  double analytic_power = 0.0;
  /// w(z) sqrt(|m| + 1) relative to the grid half-width.
  double radius_fraction = 0.0;
  bool undersized_grid_warning = false;
};

/// Laguerre-Gauss mode u_{p,m}(r, phi, z) sampled on `grid`, including the
/// curvature, Gouy and exp(-i m phi) terms, rescaled to unit discrete power.
///
/// Warns on stderr when w(z) sqrt(|m|+1) exceeds a quarter of the grid
/// half-width and throws std::invalid_argument beyond half of it.
ScalarField lg_field(ModeIndex mode, const BeamParams& beam, double z, const GridSpec& grid,
                     LgDiagnostics* diagnostics = nullptr);

/// sum a * conj(b) * dx^2. Throws std::invalid_argument on grid or plane mismatch.
cplx inner_product(const ScalarField& a, const ScalarField& b);

/// sum |a|^2 dx^2
double power(const ScalarField& a);

/// "OAMF" dump: magic, u32 n, f64 dx, f64 z, then n*n (re, im) f64 pairs,
/// all little-endian.
void write_field(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_field(const std::filesystem::path& path);

}  // namespace oamfso
