#include "blochlab/spectral.hpp"

#include "blochlab/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace blochlab::spectral {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

} // namespace

struct Fft::Impl {
    std::size_t n = 0;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    explicit Impl(std::size_t size) : n(size)
    {
        if (n == 0) {
            throw InvalidArgument("Fft: length must be positive");
        }
        std::lock_guard lock(planner_mutex());
        in = fftw_alloc_complex(n);
        out = fftw_alloc_complex(n);
        const int len = static_cast<int>(n);
        fwd = fftw_plan_dft_1d(len, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(len, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    ~Impl()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(in);
        fftw_free(out);
    }

    void run(fftw_plan plan, std::span<const cplx> src, std::span<cplx> dst) const
    {
        if (src.size() != n || dst.size() != n) {
            throw InvalidArgument("Fft: buffer length does not match plan");
        }
        std::copy(src.begin(), src.end(), reinterpret_cast<cplx*>(in));
        fftw_execute(plan);
        std::copy_n(reinterpret_cast<const cplx*>(out), n, dst.begin());
    }
};

Fft::Fft(std::size_t n) : impl_(std::make_unique<Impl>(n)) {}
Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

std::size_t Fft::size() const { return impl_->n; }

void Fft::forward(std::span<const cplx> in, std::span<cplx> out) const { impl_->run(impl_->fwd, in, out); }

void Fft::backward(std::span<const cplx> in, std::span<cplx> out) const { impl_->run(impl_->bwd, in, out); }

TrigSeries::TrigSeries(std::span<const cplx> samples, double origin, double period)
    : coeffs_(samples.size()), origin_(origin), period_(period)
{
    if (samples.empty()) {
        throw InvalidArgument("TrigSeries: no samples");
    }
    if (!(period > 0.0)) {
        throw InvalidArgument("TrigSeries: period must be positive");
    }
    Fft fft(samples.size());
    fft.forward(samples, coeffs_);
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    for (auto& c : coeffs_) {
        c *= inv_n;
    }
}

TrigSeries::TrigSeries(std::span<const double> samples, double origin, double period)
    : TrigSeries(ComplexVector(samples.begin(), samples.end()), origin, period)
{
}

// Multiplier applied to coefficient `index` for a p-th derivative evaluated at
// displacement `shift` from the sample points. The Nyquist mode of an even
// length series is a cosine; its sample-point phase (-1)^j comes from the FFT.
cplx TrigSeries::mode_factor(std::size_t index, double shift, int p) const
{
    const std::size_t n = coeffs_.size();
    const double w = two_pi / period_;
    if (index == 0) {
        return p == 0 ? cplx{1.0, 0.0} : cplx{};
    }
    if (n % 2 == 0 && index == n / 2) {
        const double a = w * static_cast<double>(n / 2);
        return std::pow(a, p) * std::cos(a * shift + p * std::numbers::pi / 2.0);
    }
    const long m = index < (n + 1) / 2 ? static_cast<long>(index) : static_cast<long>(index) - static_cast<long>(n);
    const cplx iwm{0.0, w * static_cast<double>(m)};
    return std::pow(iwm, p) * std::exp(iwm * shift);
}

cplx TrigSeries::operator()(double x, int p) const
{
    const std::size_t n = coeffs_.size();
    const double u = x - origin_;
    const double w = two_pi / period_;
    cplx sum{};
    for (std::size_t index = 0; index < n; ++index) {
        if (index == 0) {
            if (p == 0) {
                sum += coeffs_[0];
            }
            continue;
        }
        if (n % 2 == 0 && index == n / 2) {
            const double a = w * static_cast<double>(n / 2);
            sum += coeffs_[index] * std::pow(a, p) * std::cos(a * u + p * std::numbers::pi / 2.0);
            continue;
        }
        const long m = index < (n + 1) / 2 ? static_cast<long>(index) : static_cast<long>(index) - static_cast<long>(n);
        const cplx iwm{0.0, w * static_cast<double>(m)};
        sum += coeffs_[index] * std::pow(iwm, p) * std::exp(iwm * u);
    }
    return sum;
}

ComplexVector TrigSeries::shifted(double shift, int p) const
{
    const std::size_t n = coeffs_.size();
    ComplexVector modes(n);
    for (std::size_t index = 0; index < n; ++index) {
        modes[index] = coeffs_[index] * mode_factor(index, shift, p);
    }
    ComplexVector out(n);
    Fft fft(n);
    fft.backward(modes, out);
    return out;
}

ComplexVector derivative(std::span<const cplx> samples, double period, int order)
{
    return TrigSeries(samples, 0.0, period).shifted(0.0, order);
}

RealVector derivative(std::span<const double> samples, double period, int order)
{
    const auto d = TrigSeries(samples, 0.0, period).shifted(0.0, order);
    RealVector out(d.size());
    std::transform(d.begin(), d.end(), out.begin(), [](cplx z) { return z.real(); });
    return out;
}

} // namespace blochlab::spectral
