#pragma once

#include <fftw3.h>

#include <cstddef>
#include <memory>
#include <mutex>
#include <new>

namespace symentropy::detail {

// The FFTW planner is not re-entrant; execution with the new-array interface is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  void* raw = fftw_malloc(sizeof(T) * n);
  if (!raw) throw std::bad_alloc();
  return FftwBuffer<T>(static_cast<T*>(raw));
}

/// Forward real-to-complex and inverse complex-to-real plans of one length.
/// Buffers passed to forward()/inverse() must come from fftw_buffer() so they
/// share the planning alignment.
class RealFftPlans {
 public:
  explicit RealFftPlans(std::size_t n) : n_(n) {
    auto real = fftw_buffer<double>(n);
    auto spectrum = fftw_buffer<fftw_complex>(n / 2 + 1);
    std::lock_guard lock(fftw_planner_mutex());
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.get(), spectrum.get(), FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), spectrum.get(), real.get(), FFTW_ESTIMATE);
  }

  RealFftPlans(const RealFftPlans&) = delete;
  RealFftPlans& operator=(const RealFftPlans&) = delete;

  ~RealFftPlans() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }

  void forward(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(forward_, in, out); }
  /// Unnormalized inverse; clobbers `in`.
  void inverse(fftw_complex* in, double* out) const { fftw_execute_dft_c2r(inverse_, in, out); }

 private:
  std::size_t n_;
  fftw_plan forward_{};
  fftw_plan inverse_{};
};

}  // namespace symentropy::detail
