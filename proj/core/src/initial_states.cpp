#include "blochlab/initial_states.hpp"

#include "blochlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace blochlab {

std::string to_string(StateKind kind)
{
    switch (kind) {
    case StateKind::wannier:
        return "wannier";
    case StateKind::gaussian:
        return "gaussian";
    case StateKind::near_bloch:
        return "near_bloch";
    case StateKind::custom:
        break;
    }
    return "custom";
}

StateKind state_kind_from_string(const std::string& name)
{
    if (name == "wannier") return StateKind::wannier;
    if (name == "gaussian") return StateKind::gaussian;
    if (name == "near_bloch") return StateKind::near_bloch;
    if (name == "custom") return StateKind::custom;
    throw InvalidArgument("unknown state kind '" + name + "'");
}

MomentumState::MomentumState(ZoneGrid grid, std::vector<ComplexVector> amplitudes, StateTag tag)
    : grid_(grid), amplitudes_(std::move(amplitudes)), tag_(tag)
{
    for (const auto& row : amplitudes_) {
        if (row.size() != grid_.size()) {
            throw GridMismatchError("MomentumState: amplitude row length differs from the k grid");
        }
    }
}

double MomentumState::norm() const
{
    double s = 0.0;
    for (const auto& row : amplitudes_) {
        for (const auto& a : row) {
            s += std::norm(a);
        }
    }
    return s * grid_.spacing();
}

double MomentumState::max_imag() const
{
    double m = 0.0;
    for (const auto& row : amplitudes_) {
        for (const auto& a : row) {
            m = std::max(m, std::abs(a.imag()));
        }
    }
    return m;
}

double MomentumState::normalize()
{
    const double n = norm();
    if (!(n > 0.0)) {
        throw InvalidArgument("MomentumState: cannot normalize a zero state");
    }
    const double s = 1.0 / std::sqrt(n);
    for (auto& row : amplitudes_) {
        for (auto& a : row) {
            a *= s;
        }
    }
    return n;
}

namespace {

void check_grid(double period, std::size_t num_k)
{
    if (!(period > 0.0)) {
        throw InvalidArgument("period must be positive");
    }
    if (num_k < 2 || num_k % 2 != 0) {
        throw InvalidArgument("num_k must be even and at least 2");
    }
}

std::vector<ComplexVector> single_band(std::size_t band, std::size_t num_k)
{
    return std::vector<ComplexVector>(band + 1, ComplexVector(num_k, cplx{}));
}

// Profile exp(-(k-k0)^2/2rho^2) summed over reciprocal-lattice images until
// the newest image pair adds less than 1e-16 anywhere on the grid.
RealVector periodized_gaussian(const ZoneGrid& grid, double rho, double k0)
{
    const std::size_t nk = grid.size();
    const double w = grid.width();
    const double c0 = grid.wrap(k0);
    RealVector g(nk, 0.0);
    auto add_image = [&](long m) {
        double biggest = 0.0;
        for (std::size_t j = 0; j < nk; ++j) {
            const double q = grid.k(j) - c0 + static_cast<double>(m) * w;
            const double v = std::exp(-q * q / (2.0 * rho * rho));
            g[j] += v;
            biggest = std::max(biggest, v);
        }
        return biggest;
    };
    add_image(0);
    for (long m = 1;; ++m) {
        const double tail = std::max(add_image(m), add_image(-m));
        if (tail < 1e-16) {
            break;
        }
    }
    return g;
}

} // namespace

MomentumState wannier_state(double period, std::size_t num_k, std::size_t band)
{
    check_grid(period, num_k);
    ZoneGrid grid(period, num_k);
    auto amps = single_band(band, num_k);
    std::fill(amps[band].begin(), amps[band].end(), cplx(std::sqrt(period / two_pi), 0.0));
    return MomentumState(grid, std::move(amps), StateTag{StateKind::wannier, 0.0, 0.0, 1.0});
}

double gaussian_constant(double rho, double period)
{
    if (!(rho > 0.0) || !(period > 0.0)) {
        throw InvalidArgument("gaussian_constant: rho and period must be positive");
    }
    const double erf_term = std::erf(std::numbers::pi / (rho * period));
    return 1.0 / std::sqrt(std::sqrt(std::numbers::pi) * rho * erf_term);
}

MomentumState gaussian_state(double rho, double k0, double period, std::size_t num_k, std::size_t band)
{
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw InvalidArgument("gaussian_state: rho must be positive");
    }
    if (!std::isfinite(k0)) {
        throw InvalidArgument("gaussian_state: k0 must be finite");
    }
    check_grid(period, num_k);
    ZoneGrid grid(period, num_k);
    const double c = gaussian_constant(rho, period);
    const RealVector g = periodized_gaussian(grid, rho, k0);
    auto amps = single_band(band, num_k);
    for (std::size_t j = 0; j < num_k; ++j) {
        amps[band][j] = cplx(c * g[j], 0.0);
    }
    MomentumState state(grid, std::move(amps), StateTag{StateKind::gaussian, rho, k0, 1.0});
    const double raw = state.normalize();
    return MomentumState(grid, state.amplitudes(), StateTag{StateKind::gaussian, rho, k0, raw});
}

MomentumState near_bloch_state(double k0, double width, double period, std::size_t num_k, std::size_t band)
{
    check_grid(period, num_k);
    const ZoneGrid grid(period, num_k);
    if (!(width >= 2.0 * grid.spacing() * (1.0 - 1e-12))) {
        throw InvalidArgument("near_bloch_state: width must be at least two k spacings");
    }
    const auto g = gaussian_state(width, k0, period, num_k, band);
    StateTag tag = g.tag();
    tag.kind = StateKind::near_bloch;
    return MomentumState(grid, g.amplitudes(), tag);
}

} // namespace blochlab
