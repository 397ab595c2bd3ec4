#ifndef PENCILFFT_KERNELS_HPP_
#define PENCILFFT_KERNELS_HPP_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pencilfft {

using Complex = std::complex<double>;

enum class Direction { Forward, Backward };

/// Serial 1D transform kinds applied along one grid dimension.
enum class Kind {
  C2C,    ///< complex-to-complex FFT (direction chosen per call)
  R2C,    ///< real-to-complex forward, keeps n/2 + 1 modes
  C2R,    ///< complex-to-real backward, expands n/2 + 1 modes
  Cos,    ///< Chebyshev (cosine) transform on Gauss-Lobatto samples
  Empty,  ///< identity pass-through
};

/**
 * Precomputed tables and radix plan for one transform length.
 *
 * The FFT core is an autosorting Stockham iteration over a fixed radix
 * sequence of 2/3/5 factors. The evaluation order per logical vector is
 * fixed and independent of how the vector is laid out in memory, so
 * batched/strided applications are bit-identical to contiguous ones.
 *
 * No kernel normalizes: backward(forward(x)) = n * x, and likewise
 * c2r(r2c(x)) = n * x. The cosine pair is the exception: synthesis of
 * analysis reproduces the samples with unit scale.
 *
 * A setup is immutable after construction; transform calls only write
 * caller-provided buffers, so concurrent use with disjoint buffers is safe.
 */
class KernelSetup {
 public:
  KernelSetup(Kind kind, int n);

  Kind kind() const { return kind_; }
  int length() const { return n_; }
  /// Output length of R2C / input length of C2R: n/2 + 1.
  int spectral_length() const { return n_ / 2 + 1; }
  const std::vector<int>& radices() const { return radices_; }

  /// Unnormalized DFT: forward uses exp(-2*pi*i*jk/n), backward exp(+...).
  void c2c(std::span<const Complex> in, std::span<Complex> out,
           Direction dir) const;

  /// Modes 0..n/2 of the forward DFT of a real vector (length n even).
  void r2c(std::span<const double> in, std::span<Complex> out) const;

  /// Unnormalized inverse of r2c: c2r(r2c(x)) = n * x.
  void c2r(std::span<const Complex> in, std::span<double> out) const;

  /**
   * Chebyshev transform. Forward maps samples f_j at z_j = cos(pi*j/(n-1))
   * to coefficients c_k with f(z) = sum c_k T_k(z); backward evaluates that
   * sum back at the sample points. backward(forward(f)) = f.
   */
  void cosine(std::span<const double> in, std::span<double> out,
              Direction dir) const;

  /**
   * In-place transform of `count` logical vectors stored in `data`:
   * element j of vector q lives at data[q*dist + j*stride]. Dispatches on
   * the setup kind (C2C and Cos act on complex data, Cos componentwise on
   * re/im; Empty is a no-op). Throws on geometry that allows vectors to
   * alias each other.
   */
  void batched(Complex* data, std::size_t count, std::size_t stride,
               std::size_t dist, Direction dir) const;

  /// Strided real-in / complex-out batch of r2c lines.
  void batched_r2c(const double* in, std::size_t in_stride,
                   std::size_t in_dist, Complex* out, std::size_t out_stride,
                   std::size_t out_dist, std::size_t count) const;

  /// Strided complex-in / real-out batch of c2r lines.
  void batched_c2r(const Complex* in, std::size_t in_stride,
                   std::size_t in_dist, double* out, std::size_t out_stride,
                   std::size_t out_dist, std::size_t count) const;

 private:
  void core(const Complex* in, Complex* out, Complex* scratch,
            bool backward) const;
  void r2c_line(const double* in, Complex* out, Complex* work_a,
                Complex* work_b, Complex* work_c) const;
  void c2r_line(const Complex* in, double* out, Complex* work_a,
                Complex* work_b, Complex* work_c) const;
  void cos_line(const double* in, double* out, Direction dir) const;

  Kind kind_ = Kind::Empty;
  int n_ = 0;
  int half_ = 0;                   // R2C/C2R: length of the packed sub-FFT
  std::vector<int> radices_;       // radix sequence of the Stockham passes
  std::vector<Complex> tw_fwd_;    // w_n^t = exp(-2*pi*i*t/n), t in [0, n)
  std::vector<Complex> tw_bwd_;    // conjugates
  std::vector<Complex> rtw_fwd_;   // exp(-2*pi*i*k/n), k in [0, n/2]
  std::vector<Complex> rtw_bwd_;   // conjugates
  std::vector<double> cos_tab_;    // cos(pi*t/(n-1)), t in [0, 2(n-1))
};

}  // namespace pencilfft

#endif  // PENCILFFT_KERNELS_HPP_
