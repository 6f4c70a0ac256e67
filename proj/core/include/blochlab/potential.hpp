#pragma once

#include "blochlab/grid.hpp"

namespace blochlab {

/// Real periodic potential V(x) = sum_{|m|<=M} V_m exp(2 pi i m x / d).
class CrystalPotential {
  public:
    /// `coeffs` holds V_{-M}..V_{M}; it must have odd length and satisfy V_{-m} = conj(V_m).
    CrystalPotential(double period, ComplexVector coeffs);

    /// V(x) = amplitude * cos(2 pi x / d), i.e. V_{+-1} = amplitude / 2.
    static CrystalPotential cosine(double amplitude, double period);
    /// V = 0.
    static CrystalPotential empty(double period);

    double period() const { return period_; }
    int max_harmonic() const { return static_cast<int>(coeffs_.size() / 2); }
    /// V_m, zero outside the stored range.
    cplx coefficient(int m) const;
    const ComplexVector& coefficients() const { return coeffs_; }

    double operator()(double x) const;

  private:
    double period_;
    ComplexVector coeffs_;
};

} // namespace blochlab
