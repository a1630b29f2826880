#include "oamfso/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <utility>

namespace oamfso {
namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Fft2d::Fft2d(int n) : n_(n) {
  if (n <= 0) throw std::invalid_argument("Fft2d: size must be positive");
  std::lock_guard lock(planner_mutex());
  auto* buf = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
  if (!buf) throw std::bad_alloc();
  buffer_ = buf;
  forward_plan_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!forward_plan_ || !backward_plan_) {
    release();
    throw std::runtime_error("Fft2d: FFTW planning failed");
  }
}

Fft2d::~Fft2d() { release(); }

Fft2d::Fft2d(Fft2d&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      buffer_(std::exchange(other.buffer_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      backward_plan_(std::exchange(other.backward_plan_, nullptr)) {}

Fft2d& Fft2d::operator=(Fft2d&& other) noexcept {
  if (this != &other) {
    release();
    n_ = std::exchange(other.n_, 0);
    buffer_ = std::exchange(other.buffer_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    backward_plan_ = std::exchange(other.backward_plan_, nullptr);
  }
  return *this;
}

void Fft2d::release() noexcept {
  if (!buffer_ && !forward_plan_ && !backward_plan_) return;
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  if (buffer_) fftw_free(buffer_);
  buffer_ = forward_plan_ = backward_plan_ = nullptr;
}

std::span<std::complex<double>> Fft2d::data() noexcept {
  return {reinterpret_cast<std::complex<double>*>(buffer_), static_cast<std::size_t>(n_) * n_};
}

std::span<const std::complex<double>> Fft2d::data() const noexcept {
  return {reinterpret_cast<const std::complex<double>*>(buffer_),
          static_cast<std::size_t>(n_) * n_};
}

void Fft2d::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void Fft2d::backward() { fftw_execute(static_cast<fftw_plan>(backward_plan_)); }

}  // namespace oamfso
