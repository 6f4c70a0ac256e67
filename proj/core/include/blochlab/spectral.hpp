#pragma once

#include "blochlab/grid.hpp"

#include <cstddef>
#include <memory>
#include <span>

namespace blochlab::spectral {

/// Fixed-length complex DFT backed by FFTW.
///
/// forward:  X_m = sum_j x_j exp(-2 pi i j m / N)
/// backward: x_j = sum_m X_m exp(+2 pi i j m / N)   (unnormalized)
///
/// An Fft object owns scratch buffers and is not safe to share between
/// threads; construct one per thread. Planning is serialized internally.
class Fft {
  public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(Fft&&) noexcept;
    Fft& operator=(Fft&&) noexcept;
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    std::size_t size() const;
    void forward(std::span<const cplx> in, std::span<cplx> out) const;
    void backward(std::span<const cplx> in, std::span<cplx> out) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Band-limited periodic interpolant of N equispaced samples.
///
/// Samples f_j = f(origin + j*h), h = period/N. The interpolant is
///   f(x) = sum_{|m|<N/2} c_m e^{i w m (x-origin)} + c_{N/2} cos(w N/2 (x-origin)),
/// w = 2*pi/period; the Nyquist mode is kept as a cosine so real data stays real.
/// Derivative order p may be -1, which returns the zero-mean antiderivative of
/// the non-constant modes.
class TrigSeries {
  public:
    TrigSeries() = default;
    TrigSeries(std::span<const cplx> samples, double origin, double period);
    TrigSeries(std::span<const double> samples, double origin, double period);

    std::size_t size() const { return coeffs_.size(); }
    double origin() const { return origin_; }
    double period() const { return period_; }

    /// Mean value (the m = 0 coefficient).
    cplx mean() const { return coeffs_.empty() ? cplx{} : coeffs_[0]; }

    /// Coefficient of mode m in FFT order, already divided by N.
    const ComplexVector& coefficients() const { return coeffs_; }

    /// p-th derivative at an arbitrary point; p = -1 gives the zero-mean antiderivative.
    cplx operator()(double x, int p = 0) const;

    /// p-th derivative sampled at origin + j*h + shift for all j, via one inverse FFT.
    ComplexVector shifted(double shift, int p = 0) const;

  private:
    cplx mode_factor(std::size_t index, double shift, int p) const;

    ComplexVector coeffs_;
    double origin_ = 0.0;
    double period_ = 1.0;
};

/// Spectral derivative of periodic samples on a uniform grid of the given period.
ComplexVector derivative(std::span<const cplx> samples, double period, int order = 1);
RealVector derivative(std::span<const double> samples, double period, int order = 1);

} // namespace blochlab::spectral
