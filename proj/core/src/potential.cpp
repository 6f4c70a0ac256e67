#include "blochlab/potential.hpp"

#include "blochlab/error.hpp"

#include <cmath>
#include <utility>

namespace blochlab {

CrystalPotential::CrystalPotential(double period, ComplexVector coeffs) : period_(period), coeffs_(std::move(coeffs))
{
    if (!(period > 0.0)) {
        throw InvalidArgument("CrystalPotential: period must be positive");
    }
    if (coeffs_.size() % 2 != 1) {
        throw InvalidArgument("CrystalPotential: coefficient list must cover -M..M");
    }
    const int harmonics = max_harmonic();
    for (int m = 0; m <= harmonics; ++m) {
        const cplx plus = coefficient(m);
        const cplx minus = coefficient(-m);
        const double scale = std::max(1.0, std::abs(plus));
        if (std::abs(minus - std::conj(plus)) > 1e-12 * scale) {
            throw InvalidArgument("CrystalPotential: coefficients must satisfy V_{-m} = conj(V_m)");
        }
    }
    // V_0 must be exactly real for a Hermitian diagonal.
    coeffs_[static_cast<std::size_t>(harmonics)] = coeffs_[static_cast<std::size_t>(harmonics)].real();
}

CrystalPotential CrystalPotential::cosine(double amplitude, double period)
{
    return CrystalPotential(period, {amplitude / 2.0, 0.0, amplitude / 2.0});
}

CrystalPotential CrystalPotential::empty(double period) { return CrystalPotential(period, {0.0}); }

cplx CrystalPotential::coefficient(int m) const
{
    const int harmonics = max_harmonic();
    if (m < -harmonics || m > harmonics) {
        return {};
    }
    return coeffs_[static_cast<std::size_t>(m + harmonics)];
}

double CrystalPotential::operator()(double x) const
{
    const int harmonics = max_harmonic();
    double v = coefficient(0).real();
    for (int m = 1; m <= harmonics; ++m) {
        v += 2.0 * (coefficient(m) * std::exp(cplx{0.0, two_pi * m * x / period_})).real();
    }
    return v;
}

} // namespace blochlab
