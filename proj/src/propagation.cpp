#include "oamfso/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace oamfso {

void LinkParams::validate() const {
  grid.validate();
  if (!(z_total > 0.0)) throw std::invalid_argument("LinkParams: z_total must be positive");
  if (substeps_per_slab < 1) throw std::invalid_argument("LinkParams: substeps_per_slab must be >= 1");
}

Propagator::Propagator(const GridSpec& grid, const BeamParams& beam)
    : grid_(grid), beam_(beam), fft_((grid.validate(), grid.n)) {}

const std::vector<cplx>& Propagator::transfer(double dz) {
  auto it = transfer_cache_.find(dz);
  if (it != transfer_cache_.end()) return it->second;

  const int n = grid_.n;
  const double dk = 2.0 * std::numbers::pi / (n * grid_.dx);
  const double k = beam_.wavenumber();
  const double inv_count = 1.0 / (static_cast<double>(n) * n);
  std::vector<cplx> h(grid_.sample_count());
  for (int row = 0; row < n; ++row) {
    const double ky = fft_frequency_index(row, n) * dk;
    for (int col = 0; col < n; ++col) {
      const double kx = fft_frequency_index(col, n) * dk;
      const double kappa2 = kx * kx + ky * ky;
      cplx value{0.0, 0.0};
      if (kappa2 < k * k) {
        // sqrt(k^2 - kappa^2) - k without cancellation.
        const double kz_minus_k = -kappa2 / (std::sqrt(k * k - kappa2) + k);
        const double phase = -dz * kz_minus_k;
        value = cplx(std::cos(phase), std::sin(phase)) * inv_count;
      }
      h[static_cast<std::size_t>(row) * n + col] = value;
    }
  }
  return transfer_cache_.emplace(dz, std::move(h)).first->second;
}

void Propagator::absorb(std::vector<cplx>& samples) {
  const int n = grid_.n;
  if (absorber_.empty()) {
    absorber_.assign(static_cast<std::size_t>(n), 1.0);
    const int margin = std::max(1, n / 10);
    for (int i = 0; i < margin; ++i) {
      const double w = 0.5 * (1.0 - std::cos(std::numbers::pi * (i + 0.5) / margin));
      absorber_[i] = w;
      absorber_[n - 1 - i] = w;
    }
  }
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col)
      samples[static_cast<std::size_t>(row) * n + col] *= absorber_[row] * absorber_[col];
}

void Propagator::vacuum_step_inplace(std::vector<cplx>& samples, double dz) {
  if (!(dz > 0.0)) throw std::invalid_argument("vacuum_step: dz must be positive");
  if (samples.size() != grid_.sample_count())
    throw std::invalid_argument("vacuum_step: sample count does not match grid");
  const auto& h = transfer(dz);
  auto buf = fft_.data();
  std::copy(samples.begin(), samples.end(), buf.begin());
  fft_.forward();
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= h[i];
  fft_.backward();
  std::copy(buf.begin(), buf.end(), samples.begin());
}

ScalarField Propagator::vacuum_step(const ScalarField& field, double dz) {
  if (field.grid != grid_) throw std::invalid_argument("vacuum_step: grid mismatch");
  ScalarField out = field;
  vacuum_step_inplace(out.samples, dz);
  out.z = field.z + dz;
  return out;
}

void Propagator::propagate_inplace(std::vector<cplx>& samples,
                                   const std::vector<std::vector<cplx>>& phasors,
                                   const ScreenStack& stack, const LinkParams& link) {
  if (stack.slab_count < 1) throw std::invalid_argument("propagate: stack has no slabs");
  if (!stack.is_vacuum() && static_cast<int>(stack.screens.size()) != stack.slab_count)
    throw std::invalid_argument("propagate: stack must hold one screen per slab");
  if (std::abs(stack.path_length() - link.z_total) > 1e-9 * link.z_total)
    throw std::invalid_argument("propagate: stack does not cover the link length");
  if (!phasors.empty() && phasors.size() != stack.screens.size())
    throw std::invalid_argument("propagate: phasor count does not match screens");

  const int sub = link.substeps_per_slab;
  auto walk = [&](double length) {
    const double dz = length / sub;
    for (int s = 0; s < sub; ++s) {
      vacuum_step_inplace(samples, dz);
      if (link.edge_absorber) absorb(samples);
    }
  };
  auto apply_screen = [&](int j) {
    if (phasors.empty()) return;
    const auto& ph = phasors[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] *= ph[i];
  };

  for (int j = 0; j < stack.slab_count; ++j) {
    if (link.placement == Placement::slab_end) {
      walk(stack.spacing);
      apply_screen(j);
    } else {
      walk(0.5 * stack.spacing);
      apply_screen(j);
      walk(0.5 * stack.spacing);
    }
  }
}

ScalarField Propagator::propagate(const ScalarField& field, const ScreenStack& stack,
                                  const LinkParams& link) {
  if (field.grid != grid_ || link.grid != grid_)
    throw std::invalid_argument("propagate: field and link grids differ");
  for (const auto& s : stack.screens)
    if (s.grid != grid_) throw std::invalid_argument("propagate: screen grid differs from field grid");
  ScalarField out = field;
  propagate_inplace(out.samples, screen_phasors(stack), stack, link);
  out.z = field.z + link.z_total;
  return out;
}

std::vector<std::vector<cplx>> screen_phasors(const ScreenStack& stack) {
  std::vector<std::vector<cplx>> out;
  out.reserve(stack.screens.size());
  for (const auto& screen : stack.screens) {
    std::vector<cplx> ph(screen.phase.size());
    for (std::size_t i = 0; i < ph.size(); ++i)
      ph[i] = cplx(std::cos(screen.phase[i]), std::sin(screen.phase[i]));
    out.push_back(std::move(ph));
  }
  return out;
}

ScalarField vacuum_step(const ScalarField& field, double dz, const BeamParams& beam) {
  Propagator prop(field.grid, beam);
  return prop.vacuum_step(field, dz);
}

ScalarField propagate(const ScalarField& field, const ScreenStack& stack, const LinkParams& link) {
  link.validate();
  Propagator prop(field.grid, link.beam);
  return prop.propagate(field, stack, link);
}

ChannelSynthesizer::ChannelSynthesizer(std::vector<ModeIndex> modes, const LinkParams& link)
    : modes_(std::move(modes)), link_(link), propagator_((link.validate(), link.grid), link.beam) {
  if (modes_.size() < 2) throw std::invalid_argument("channel_matrix: need at least two modes");
  if (std::set<ModeIndex>(modes_.begin(), modes_.end()).size() != modes_.size())
    throw std::invalid_argument("channel_matrix: modes must be distinct");
  transmit_.reserve(modes_.size());
  receive_.reserve(modes_.size());
  for (const auto& mode : modes_) {
    transmit_.push_back(lg_field(mode, link_.beam, 0.0, link_.grid));
    ScalarField rx = propagator_.vacuum_step(transmit_.back(), link_.z_total);
    const double scale = 1.0 / std::sqrt(power(rx));
    for (auto& s : rx.samples) s *= scale;
    receive_.push_back(std::move(rx));
  }
}

ChannelMatrix ChannelSynthesizer::realize(const ScreenStack& stack) {
  for (const auto& s : stack.screens)
    if (s.grid != link_.grid) throw std::invalid_argument("channel_matrix: screen grid mismatch");
  const auto phasors = screen_phasors(stack);
  const int m = static_cast<int>(modes_.size());
  const double area = link_.grid.dx * link_.grid.dx;
  ChannelMatrix out{modes_, Eigen::MatrixXcd(m, m)};
  for (int q = 0; q < m; ++q) {
    work_ = transmit_[static_cast<std::size_t>(q)].samples;
    propagator_.propagate_inplace(work_, phasors, stack, link_);
    for (int p = 0; p < m; ++p) {
      const auto& rx = receive_[static_cast<std::size_t>(p)].samples;
      double re = 0.0, im = 0.0;
      for (std::size_t i = 0; i < work_.size(); ++i) {
        const cplx t = work_[i] * std::conj(rx[i]);
        re += t.real();
        im += t.imag();
      }
      out.h(p, q) = cplx(re * area, im * area);
    }
  }
  return out;
}

ChannelMatrix channel_matrix(const std::vector<ModeIndex>& modes, const ScreenStack& stack,
                             const LinkParams& link) {
  ChannelSynthesizer synth(modes, link);
  return synth.realize(stack);
}

}  // namespace oamfso
