#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace oamfso {

/// In-place 2-D complex FFT over an n x n workspace (FFTW backend).
///
/// Plans are built with FFTW_ESTIMATE so that the chosen algorithm, and hence
/// every output bit, is the same from run to run. Forward uses exp(-i k x),
/// backward uses exp(+i k x); neither is normalized.
class Fft2d {
 public:
  explicit Fft2d(int n);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;
  Fft2d(Fft2d&& other) noexcept;
  Fft2d& operator=(Fft2d&& other) noexcept;

  int size() const noexcept { return n_; }
  std::span<std::complex<double>> data() noexcept;
  std::span<const std::complex<double>> data() const noexcept;

  void forward();
  void backward();

 private:
  void release() noexcept;

  int n_ = 0;
  void* buffer_ = nullptr;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

/// Signed FFT frequency index for bin i of an n-point transform.
constexpr int fft_frequency_index(int i, int n) noexcept { return i < n / 2 ? i : i - n; }

}  // namespace oamfso
