#include "pencilfft/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pencilfft {

namespace {

constexpr double kPi = std::numbers::pi;

// w_n^t with sign -1 (forward); multiples of a quarter turn are snapped to
// exact values so self-conjugate modes come out with exactly zero imaginary
// parts.
Complex unit_root(std::int64_t t, std::int64_t n) {
  t %= n;
  if ((4 * t) % n == 0) {
    switch ((4 * t) / n) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, -1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, 1.0};
    }
  }
  const double ang = -2.0 * kPi * double(t) / double(n);
  return {std::cos(ang), std::sin(ang)};
}

std::vector<int> factorize_radices(int n) {
  std::vector<int> radices;
  for (int r : {5, 3, 2})
    while (n % r == 0) {
      radices.push_back(r);
      n /= r;
    }
  if (n != 1)
    throw std::invalid_argument("kernel length has a prime factor other "
                                "than 2, 3, 5");
  return radices;
}

void check_batch_geometry(std::size_t n, std::size_t count,
                          std::size_t stride, std::size_t dist) {
  if (count == 0 || n == 0) return;
  if (stride == 0 && n > 1)
    throw std::invalid_argument("batched: zero stride aliases elements");
  if (count == 1) return;
  if (dist == 0)
    throw std::invalid_argument("batched: zero dist aliases vectors");
  const bool vector_major = dist >= (n - 1) * stride + 1;
  const bool interleaved = stride >= (count - 1) * dist + 1;
  if (!vector_major && !interleaved)
    throw std::invalid_argument(
        "batched: stride/dist geometry allows vectors to overlap");
}

}  // namespace

KernelSetup::KernelSetup(Kind kind, int n) : kind_(kind), n_(n) {
  if (n < 1) throw std::invalid_argument("kernel length must be positive");
  switch (kind) {
    case Kind::C2C: {
      radices_ = factorize_radices(n);
      tw_fwd_.resize(n);
      tw_bwd_.resize(n);
      for (int t = 0; t < n; ++t) {
        tw_fwd_[t] = unit_root(t, n);
        tw_bwd_[t] = std::conj(tw_fwd_[t]);
      }
      break;
    }
    case Kind::R2C:
    case Kind::C2R: {
      if (n % 2 != 0)
        throw std::invalid_argument("real transform length must be even");
      half_ = n / 2;
      radices_ = factorize_radices(half_);
      tw_fwd_.resize(half_);
      tw_bwd_.resize(half_);
      for (int t = 0; t < half_; ++t) {
        tw_fwd_[t] = unit_root(t, half_);
        tw_bwd_[t] = std::conj(tw_fwd_[t]);
      }
      rtw_fwd_.resize(half_ + 1);
      rtw_bwd_.resize(half_ + 1);
      for (int k = 0; k <= half_; ++k) {
        rtw_fwd_[k] = unit_root(k, n);
        rtw_bwd_[k] = std::conj(rtw_fwd_[k]);
      }
      break;
    }
    case Kind::Cos: {
      if (n < 2)
        throw std::invalid_argument("cosine transform needs n >= 2");
      const int L = n - 1;
      cos_tab_.resize(2 * L);
      for (int t = 0; t < 2 * L; ++t)
        cos_tab_[t] = std::cos(kPi * double(t) / double(L));
      break;
    }
    case Kind::Empty:
      break;
  }
}

/* Autosort Stockham iteration. Pass with current length L = r*m and span s
   maps
       y[q + s*(r*p + v)] = ( sum_u x[q + s*(p + m*u)] * w_r^{u v} ) * w_L^{p v}
   for p in [0, m), q in [0, s), v in [0, r). After the pass L <- m, s <- s*r.
   Buffers ping-pong so the final pass lands in `out`; the per-element
   evaluation order is fixed, independent of batching or strides. */
void KernelSetup::core(const Complex* in, Complex* out, Complex* scratch,
                       bool backward) const {
  const int N = int(tw_fwd_.size());
  if (N <= 1) {
    out[0] = in[0];
    return;
  }
  const Complex* tw = (backward ? tw_bwd_ : tw_fwd_).data();
  const double sg = backward ? 1.0 : -1.0;
  const double s3 = sg * 0.8660254037844386467637231707529362;  // sin(pi/3)
  const double c51 = 0.3090169943749474241022934171828191;      // cos(2pi/5)
  const double c52 = -0.8090169943749474241022934171828191;     // cos(4pi/5)
  const double s51 = sg * 0.9510565162951535721164393333793821; // sin(2pi/5)
  const double s52 = sg * 0.5877852522924731291687059546390728; // sin(4pi/5)

  const int passes = int(radices_.size());
  const Complex* src = in;
  Complex* dst = (passes % 2 == 1) ? out : scratch;
  Complex* other = (passes % 2 == 1) ? scratch : out;

  int L = N;
  std::size_t s = 1;
  for (int pass = 0; pass < passes; ++pass) {
    const int r = radices_[pass];
    const int m = L / r;
    const int step = N / L;  // w_L = w_N^step
    for (int p = 0; p < m; ++p) {
      const Complex* x = src + s * p;
      Complex* y = dst + s * std::size_t(r) * p;
      for (std::size_t q = 0; q < s; ++q) {
        switch (r) {
          case 2: {
            const Complex a = x[q];
            const Complex b = x[q + s * m];
            y[q] = a + b;
            y[q + s] = (a - b) * tw[std::size_t(step) * p];
            break;
          }
          case 3: {
            const Complex z0 = x[q];
            const Complex z1 = x[q + s * m];
            const Complex z2 = x[q + 2 * s * m];
            const Complex t = z1 + z2;
            const Complex u = z0 - 0.5 * t;
            const Complex d = Complex(0.0, s3) * (z1 - z2);
            y[q] = z0 + t;
            y[q + s] = (u + d) * tw[std::size_t(step) * p];
            y[q + 2 * s] = (u - d) * tw[std::size_t(step) * 2 * p];
            break;
          }
          default: {  // 5
            const Complex z0 = x[q];
            const Complex z1 = x[q + s * m];
            const Complex z2 = x[q + 2 * s * m];
            const Complex z3 = x[q + 3 * s * m];
            const Complex z4 = x[q + 4 * s * m];
            const Complex t1 = z1 + z4;
            const Complex t2 = z2 + z3;
            const Complex t3 = z1 - z4;
            const Complex t4 = z2 - z3;
            const Complex m1 = z0 + c51 * t1 + c52 * t2;
            const Complex m2 = z0 + c52 * t1 + c51 * t2;
            const Complex d1 = Complex(0.0, 1.0) * (s51 * t3 + s52 * t4);
            const Complex d2 = Complex(0.0, 1.0) * (s52 * t3 - s51 * t4);
            y[q] = z0 + t1 + t2;
            y[q + s] = (m1 + d1) * tw[std::size_t(step) * p];
            y[q + 2 * s] = (m2 + d2) * tw[std::size_t(step) * 2 * p];
            y[q + 3 * s] = (m2 - d2) * tw[std::size_t(step) * 3 * p];
            y[q + 4 * s] = (m1 - d1) * tw[std::size_t(step) * 4 * p];
            break;
          }
        }
      }
    }
    L = m;
    s *= r;
    src = dst;
    std::swap(dst, other);
  }
}

void KernelSetup::c2c(std::span<const Complex> in, std::span<Complex> out,
                      Direction dir) const {
  if (kind_ != Kind::C2C)
    throw std::invalid_argument("c2c called on a non-C2C setup");
  if (int(in.size()) != n_ || int(out.size()) != n_)
    throw std::invalid_argument("c2c: length mismatch, setup n = " +
                                std::to_string(n_));
  std::vector<Complex> scratch(n_);
  if (in.data() == out.data()) {
    std::vector<Complex> tmp(in.begin(), in.end());
    core(tmp.data(), out.data(), scratch.data(), dir == Direction::Backward);
  } else {
    core(in.data(), out.data(), scratch.data(), dir == Direction::Backward);
  }
}

/* Packed-real trick: the n real samples are folded into an n/2 complex
   vector, transformed once, and untangled into modes 0..n/2. Modes 0 and
   n/2 are written with exactly zero imaginary part. */
void KernelSetup::r2c_line(const double* in, Complex* out, Complex* work_a,
                           Complex* work_b, Complex* work_c) const {
  const int h = half_;
  for (int j = 0; j < h; ++j) work_a[j] = Complex(in[2 * j], in[2 * j + 1]);
  core(work_a, work_b, work_c, false);
  out[0] = Complex(work_b[0].real() + work_b[0].imag(), 0.0);
  out[h] = Complex(work_b[0].real() - work_b[0].imag(), 0.0);
  for (int k = 1; k < h; ++k) {
    const Complex zk = work_b[k];
    const Complex zr = std::conj(work_b[h - k]);
    const Complex a = 0.5 * (zk + zr);
    const Complex b = 0.5 * (zk - zr);
    out[k] = a - Complex(0.0, 1.0) * rtw_fwd_[k] * b;
  }
}

void KernelSetup::c2r_line(const Complex* in, double* out, Complex* work_a,
                           Complex* work_b, Complex* work_c) const {
  const int h = half_;
  for (int k = 0; k < h; ++k) {
    const Complex xk = in[k];
    const Complex xr = std::conj(in[h - k]);
    work_a[k] = (xk + xr) + Complex(0.0, 1.0) * rtw_bwd_[k] * (xk - xr);
  }
  core(work_a, work_b, work_c, true);
  for (int j = 0; j < h; ++j) {
    out[2 * j] = work_b[j].real();
    out[2 * j + 1] = work_b[j].imag();
  }
}

void KernelSetup::r2c(std::span<const double> in,
                      std::span<Complex> out) const {
  if (kind_ != Kind::R2C)
    throw std::invalid_argument("r2c called on a non-R2C setup");
  if (int(in.size()) != n_ || int(out.size()) != spectral_length())
    throw std::invalid_argument("r2c: length mismatch");
  std::vector<Complex> wa(half_), wb(half_), wc(half_);
  r2c_line(in.data(), out.data(), wa.data(), wb.data(), wc.data());
}

void KernelSetup::c2r(std::span<const Complex> in,
                      std::span<double> out) const {
  if (kind_ != Kind::C2R)
    throw std::invalid_argument("c2r called on a non-C2R setup");
  if (int(in.size()) != spectral_length() || int(out.size()) != n_)
    throw std::invalid_argument("c2r: length mismatch");
  double mag = 0.0;
  for (const Complex& z : in) mag = std::max(mag, std::abs(z));
  const double tol = 1e-12 * mag;
  if (std::abs(in[0].imag()) > tol || std::abs(in[half_].imag()) > tol)
    throw std::invalid_argument(
        "c2r: modes 0 and n/2 must have (near) zero imaginary part");
  std::vector<Complex> wa(half_), wb(half_), wc(half_);
  c2r_line(in.data(), out.data(), wa.data(), wb.data(), wc.data());
}

void KernelSetup::cos_line(const double* in, double* out,
                           Direction dir) const {
  const int L = n_ - 1;
  const std::int64_t period = 2 * L;
  if (dir == Direction::Forward) {
    for (int k = 0; k <= L; ++k) {
      double acc = 0.5 * in[0] + 0.5 * (k % 2 ? -in[L] : in[L]);
      for (int j = 1; j < L; ++j)
        acc += in[j] * cos_tab_[(std::int64_t(j) * k) % period];
      out[k] = (2.0 / L) * acc;
    }
    out[0] *= 0.5;
    out[L] *= 0.5;
  } else {
    for (int j = 0; j <= L; ++j) {
      double acc = 0.0;
      for (int k = 0; k <= L; ++k)
        acc += in[k] * cos_tab_[(std::int64_t(j) * k) % period];
      out[j] = acc;
    }
  }
}

void KernelSetup::cosine(std::span<const double> in, std::span<double> out,
                         Direction dir) const {
  if (kind_ != Kind::Cos)
    throw std::invalid_argument("cosine called on a non-Cos setup");
  if (int(in.size()) != n_ || int(out.size()) != n_)
    throw std::invalid_argument("cosine: length mismatch");
  if (in.data() == out.data()) {
    std::vector<double> tmp(in.begin(), in.end());
    cos_line(tmp.data(), out.data(), dir);
  } else {
    cos_line(in.data(), out.data(), dir);
  }
}

void KernelSetup::batched(Complex* data, std::size_t count, std::size_t stride,
                          std::size_t dist, Direction dir) const {
  if (kind_ == Kind::Empty || count == 0) return;
  const std::size_t n = std::size_t(n_);
  check_batch_geometry(n, count, stride, dist);
  switch (kind_) {
    case Kind::C2C: {
      std::vector<Complex> la(n), lb(n), lc(n);
      for (std::size_t q = 0; q < count; ++q) {
        Complex* base = data + q * dist;
        for (std::size_t j = 0; j < n; ++j) la[j] = base[j * stride];
        core(la.data(), lb.data(), lc.data(), dir == Direction::Backward);
        for (std::size_t j = 0; j < n; ++j) base[j * stride] = lb[j];
      }
      break;
    }
    case Kind::Cos: {
      std::vector<double> fr(n), fi(n), gr(n), gi(n);
      for (std::size_t q = 0; q < count; ++q) {
        Complex* base = data + q * dist;
        for (std::size_t j = 0; j < n; ++j) {
          fr[j] = base[j * stride].real();
          fi[j] = base[j * stride].imag();
        }
        cos_line(fr.data(), gr.data(), dir);
        cos_line(fi.data(), gi.data(), dir);
        for (std::size_t j = 0; j < n; ++j)
          base[j * stride] = Complex(gr[j], gi[j]);
      }
      break;
    }
    default:
      throw std::invalid_argument(
          "batched: R2C/C2R setups need the real/complex batch entry points");
  }
}

void KernelSetup::batched_r2c(const double* in, std::size_t in_stride,
                              std::size_t in_dist, Complex* out,
                              std::size_t out_stride, std::size_t out_dist,
                              std::size_t count) const {
  if (kind_ != Kind::R2C)
    throw std::invalid_argument("batched_r2c called on a non-R2C setup");
  const std::size_t n = std::size_t(n_);
  const std::size_t nc = std::size_t(spectral_length());
  check_batch_geometry(n, count, in_stride, in_dist);
  check_batch_geometry(nc, count, out_stride, out_dist);
  std::vector<double> line(n);
  std::vector<Complex> spec(nc), wa(half_), wb(half_), wc(half_);
  for (std::size_t q = 0; q < count; ++q) {
    const double* src = in + q * in_dist;
    for (std::size_t j = 0; j < n; ++j) line[j] = src[j * in_stride];
    r2c_line(line.data(), spec.data(), wa.data(), wb.data(), wc.data());
    Complex* dst = out + q * out_dist;
    for (std::size_t k = 0; k < nc; ++k) dst[k * out_stride] = spec[k];
  }
}

void KernelSetup::batched_c2r(const Complex* in, std::size_t in_stride,
                              std::size_t in_dist, double* out,
                              std::size_t out_stride, std::size_t out_dist,
                              std::size_t count) const {
  if (kind_ != Kind::C2R)
    throw std::invalid_argument("batched_c2r called on a non-C2R setup");
  const std::size_t n = std::size_t(n_);
  const std::size_t nc = std::size_t(spectral_length());
  check_batch_geometry(nc, count, in_stride, in_dist);
  check_batch_geometry(n, count, out_stride, out_dist);
  std::vector<Complex> spec(nc), wa(half_), wb(half_), wc(half_);
  std::vector<double> line(n);
  for (std::size_t q = 0; q < count; ++q) {
    const Complex* src = in + q * in_dist;
    for (std::size_t k = 0; k < nc; ++k) spec[k] = src[k * in_stride];
    c2r_line(spec.data(), line.data(), wa.data(), wb.data(), wc.data());
    double* dst = out + q * out_dist;
    for (std::size_t j = 0; j < n; ++j) dst[j * out_stride] = line[j];
  }
}

}  // namespace pencilfft
