#pragma once

#include "oamfso/fft.hpp"
#include "oamfso/fieldgrid.hpp"
#include "oamfso/turbulence.hpp"

#include <Eigen/Dense>

#include <map>
#include <vector>

namespace oamfso {

struct LinkParams {
  double z_total = 1000.0;
  BeamParams beam{1.6e-2, 1550e-9};
  GridSpec grid{};
  Placement placement = Placement::slab_end;
  /// Vacuum sub-steps per slab (per half slab under slab_center).
  int substeps_per_slab = 1;
  /// Raised-cosine edge absorber applied after every vacuum step.
  bool edge_absorber = false;

  void validate() const;
};

/// Received-mode coupling matrix. h(p, q) is the amplitude coupled from
/// transmit mode q into receive mode p; transmit and receive bases share
/// the same ordered mode list.
struct ChannelMatrix {
  std::vector<ModeIndex> modes;
  Eigen::MatrixXcd h;

  int size() const noexcept { return static_cast<int>(modes.size()); }
};

/// Split-step propagation engine: owns an FFT workspace and caches vacuum
/// transfer functions per step length. Not thread-safe; one per worker.
class Propagator {
 public:
  Propagator(const GridSpec& grid, const BeamParams& beam);

  const GridSpec& grid() const noexcept { return grid_; }

  /// Angular-spectrum vacuum step over dz, in place on the workspace field.
  void vacuum_step_inplace(std::vector<cplx>& samples, double dz);
  ScalarField vacuum_step(const ScalarField& field, double dz);

  /// Vacuum steps and screen multiplications over the whole stack.
  ScalarField propagate(const ScalarField& field, const ScreenStack& stack, const LinkParams& link);

  /// Same, with screens already converted to exp(i phase) phasors (one
  /// vector per slab, or empty for a vacuum stack).
  void propagate_inplace(std::vector<cplx>& samples, const std::vector<std::vector<cplx>>& phasors,
                         const ScreenStack& stack, const LinkParams& link);

 private:
  const std::vector<cplx>& transfer(double dz);
  void absorb(std::vector<cplx>& samples);

  GridSpec grid_;
  BeamParams beam_;
  Fft2d fft_;
  std::map<double, std::vector<cplx>> transfer_cache_;
  std::vector<double> absorber_;
};

/// Free-space step exp(-i dz (sqrt(k^2 - kappa^2) - k)) in the spectral
/// domain; evanescent components are zeroed.
ScalarField vacuum_step(const ScalarField& field, double dz, const BeamParams& beam);

/// Throws std::invalid_argument when field, stack and link grids disagree or
/// the stack does not cover link.z_total.
ScalarField propagate(const ScalarField& field, const ScreenStack& stack, const LinkParams& link);

/// Per-screen exp(i phase) tables.
std::vector<std::vector<cplx>> screen_phasors(const ScreenStack& stack);

/// Channel synthesis with the transmit fields and vacuum receive basis built
/// once. realize() is not thread-safe; use one synthesizer per worker.
class ChannelSynthesizer {
 public:
  ChannelSynthesizer(std::vector<ModeIndex> modes, const LinkParams& link);

  ChannelMatrix realize(const ScreenStack& stack);

  const std::vector<ModeIndex>& modes() const noexcept { return modes_; }
  const std::vector<ScalarField>& receive_basis() const noexcept { return receive_; }

 private:
  std::vector<ModeIndex> modes_;
  LinkParams link_;
  Propagator propagator_;
  std::vector<ScalarField> transmit_;
  std::vector<ScalarField> receive_;
  std::vector<cplx> work_;
};

/// h(p, q) = <propagate(LG_q), vacuum LG_p at z_total>. Requires at least
/// two distinct modes.
ChannelMatrix channel_matrix(const std::vector<ModeIndex>& modes, const ScreenStack& stack,
                             const LinkParams& link);

}  // namespace oamfso
