#include "oamfso/fieldgrid.hpp"

#include "oamfso/binary_io.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>

namespace oamfso {

void GridSpec::validate() const {
  if (n < 2 || !std::has_single_bit(static_cast<unsigned>(n)))
    throw std::invalid_argument("GridSpec: n must be a power of two >= 2, got " + std::to_string(n));
  if (!(dx > 0.0) || !std::isfinite(dx))
    throw std::invalid_argument("GridSpec: dx must be positive");
}

BeamParams::BeamParams(double waist, double wavelength) : waist_(waist), wavelength_(wavelength) {
  if (!(waist > 0.0)) throw std::invalid_argument("BeamParams: waist must be positive");
  if (!(wavelength > 0.0)) throw std::invalid_argument("BeamParams: wavelength must be positive");
}

double BeamParams::rayleigh_range() const noexcept {
  return std::numbers::pi * waist_ * waist_ / wavelength_;
}

double BeamParams::wavenumber() const noexcept { return 2.0 * std::numbers::pi / wavelength_; }

double BeamParams::radius_at(double z) const noexcept {
  const double t = z / rayleigh_range();
  return waist_ * std::sqrt(1.0 + t * t);
}

ScalarField::ScalarField(const GridSpec& g, double plane_z)
    : grid(g), z(plane_z), samples(g.sample_count()) {}

ScalarField lg_field(ModeIndex mode, const BeamParams& beam, double z, const GridSpec& grid,
                     LgDiagnostics* diagnostics) {
  grid.validate();
  if (mode.p < 0) throw std::invalid_argument("lg_field: radial index p must be >= 0");

  const unsigned am = static_cast<unsigned>(std::abs(mode.m));
  const unsigned p = static_cast<unsigned>(mode.p);
  const double w = beam.radius_at(z);
  const double zr = beam.rayleigh_range();
  const double k = beam.wavenumber();

  const double radius_fraction = w * std::sqrt(am + 1.0) / grid.half_width();
  if (radius_fraction > 0.5) {
    throw std::invalid_argument("lg_field: beam radius " + std::to_string(w * std::sqrt(am + 1.0)) +
                                " m exceeds half the grid half-width");
  }
  const bool warn = radius_fraction > 0.25;
  if (warn) {
    std::cerr << "warning: lg_field(p=" << mode.p << ", m=" << mode.m
              << "): beam radius exceeds a quarter of the grid half-width\n";
  }

  // sqrt(2 p! / (pi (p+|m|)!)) / w
  const double prefactor =
      std::sqrt(2.0 / std::numbers::pi *
                std::exp(std::lgamma(p + 1.0) - std::lgamma(p + am + 1.0))) / w;
  const double curvature = -k * z / (2.0 * (z * z + zr * zr));
  const double gouy = (2.0 * p + am + 1.0) * std::atan(z / zr);

  ScalarField field(grid, z);
  double total = 0.0;
  for (int row = 0; row < grid.n; ++row) {
    const double y = grid.coordinate(row);
    for (int col = 0; col < grid.n; ++col) {
      const double x = grid.coordinate(col);
      const double r2 = x * x + y * y;
      const double rho = std::sqrt(2.0 * r2) / w;
      const double amplitude = prefactor * std::pow(rho, static_cast<double>(am)) *
                               std::assoc_laguerre(p, am, 2.0 * r2 / (w * w)) *
                               std::exp(-r2 / (w * w));
      const double phase = curvature * r2 + gouy - mode.m * std::atan2(y, x);
      const cplx u = amplitude * cplx(std::cos(phase), std::sin(phase));
      field.at(row, col) = u;
      total += std::norm(u);
    }
  }
  total *= grid.dx * grid.dx;

  if (!(total > 0.0) || !std::isfinite(total))
    throw std::runtime_error("lg_field: field has no representable power on this grid");
  const double scale = 1.0 / std::sqrt(total);
  for (auto& s : field.samples) s *= scale;

  if (diagnostics) {
    diagnostics->analytic_power = total;
    diagnostics->radius_fraction = radius_fraction;
    diagnostics->undersized_grid_warning = warn;
  }
  return field;
}

cplx inner_product(const ScalarField& a, const ScalarField& b) {
  if (a.grid != b.grid) throw std::invalid_argument("inner_product: grid mismatch");
  if (a.z != b.z) throw std::invalid_argument("inner_product: fields lie in different planes");
  if (a.samples.size() != b.samples.size())
    throw std::invalid_argument("inner_product: sample count mismatch");
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const cplx t = a.samples[i] * std::conj(b.samples[i]);
    re += t.real();
    im += t.imag();
  }
  const double area = a.grid.dx * a.grid.dx;
  return {re * area, im * area};
}

double power(const ScalarField& a) {
  double total = 0.0;
  for (const auto& s : a.samples) total += std::norm(s);
  return total * a.grid.dx * a.grid.dx;
}

void write_field(const std::filesystem::path& path, const ScalarField& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  binio::put_magic(os, "OAMF");
  binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(field.grid.n));
  binio::put<double>(os, field.grid.dx);
  binio::put<double>(os, field.z);
  for (const auto& s : field.samples) {
    binio::put<double>(os, s.real());
    binio::put<double>(os, s.imag());
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

ScalarField read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  binio::expect_magic(is, "OAMF");
  GridSpec grid;
  grid.n = static_cast<int>(binio::get<std::uint32_t>(is, "grid size"));
  grid.dx = binio::get<double>(is, "grid spacing");
  grid.validate();
  ScalarField field(grid, binio::get<double>(is, "plane position"));
  for (auto& s : field.samples) {
    const double re = binio::get<double>(is, "field samples");
    s = {re, binio::get<double>(is, "field samples")};
  }
  return field;
}

}  // namespace oamfso
