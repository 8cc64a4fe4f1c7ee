#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace tfr::detail {

// Real-to-complex DFT of a fixed length backed by an FFTW plan. Plans are
// created with FFTW_ESTIMATE so results do not depend on timing. An instance
// is not thread-safe; create one per thread.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }

  // Writes n / 2 + 1 bins of sum_m x[m] exp(-i 2 pi k m / n).
  void forward(std::span<const double> input, std::span<std::complex<double>> output);

 private:
  std::size_t n_;
  double* in_;
  void* out_;
  void* plan_;
};

}  // namespace tfr::detail
