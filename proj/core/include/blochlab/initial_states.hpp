#pragma once

#include "blochlab/grid.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace blochlab {

enum class StateKind { custom, wannier, gaussian, near_bloch };

std::string to_string(StateKind kind);
StateKind state_kind_from_string(const std::string& name);

/// How a state was built; carried along so downstream checks can pick tolerances.
struct StateTag {
    StateKind kind = StateKind::custom;
    /// rho for gaussian, the momentum width for near_bloch, zero otherwise.
    double width = 0.0;
    double center = 0.0;
    /// Grid norm before renormalization (1 for states that need none).
    double raw_norm = 1.0;
};

/// Crystal-momentum amplitudes phi_n(k_j), one row per band.
///
/// Rows may be fewer than the bands of the structure they are paired with;
/// missing rows count as zero.
class MomentumState {
  public:
    MomentumState() = default;
    MomentumState(ZoneGrid grid, std::vector<ComplexVector> amplitudes, StateTag tag = {});

    const ZoneGrid& grid() const { return grid_; }
    double period() const { return grid_.period(); }
    std::size_t num_bands() const { return amplitudes_.size(); }
    const StateTag& tag() const { return tag_; }

    std::span<const cplx> band(std::size_t n) const { return amplitudes_.at(n); }
    std::span<cplx> band(std::size_t n) { return amplitudes_.at(n); }
    const std::vector<ComplexVector>& amplitudes() const { return amplitudes_; }

    /// sum_n sum_j |phi_n(k_j)|^2 dk.
    double norm() const;
    /// Largest |Im phi| over all samples.
    double max_imag() const;
    bool is_real_valued(double tol = 1e-12) const { return max_imag() < tol; }

    /// Scale so that norm() == 1; returns the norm before scaling.
    double normalize();

  private:
    ZoneGrid grid_;
    std::vector<ComplexVector> amplitudes_;
    StateTag tag_;
};

/// Flat amplitude sqrt(d/2pi) on band n.
MomentumState wannier_state(double period, std::size_t num_k, std::size_t band = 0);

/// Gaussian c exp(-(k-k0)^2 / 2 rho^2) on band n, periodized over the zone and renormalized on the grid.
MomentumState gaussian_state(double rho, double k0, double period, std::size_t num_k, std::size_t band = 0);

/// Closed-form normalization c = [sqrt(pi) rho erf(pi/(rho d))]^{-1/2} of the unperiodized profile at k0 = 0.
double gaussian_constant(double rho, double period);

/// Narrow Gaussian standing in for a Bloch state at k0; width must cover at least two grid spacings.
MomentumState near_bloch_state(double k0, double width, double period, std::size_t num_k, std::size_t band = 0);

} // namespace blochlab
