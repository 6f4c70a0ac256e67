#include "blochlab/position_space.hpp"

#include "blochlab/error.hpp"
#include "blochlab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace blochlab {

double PositionWavepacket::norm() const
{
    double s = 0.0;
    for (const auto& v : values) {
        s += std::norm(v);
    }
    return s * grid.spacing();
}

namespace {

void check_basis(const BandStructure& bands, std::size_t num_bands)
{
    if (!bands.has_basis()) {
        throw MissingBasisError("band structure carries no Bloch basis");
    }
    if (num_bands > bands.num_bands()) {
        throw InvalidArgument("more bands requested than the band structure provides");
    }
}

// Unfolded momentum q_i = k_0 - M W + i dk for i = (m + M) N + j.
double first_q(const BandStructure& bands)
{
    return bands.grid().start() - static_cast<double>(bands.cutoff()) * bands.grid().width();
}

} // namespace

PositionWavepacket bloch_synthesis(const MomentumState& amplitudes, const BandStructure& bands, const XGrid& x_grid)
{
    check_basis(bands, amplitudes.num_bands());
    if (!(amplitudes.grid() == bands.grid())) {
        throw GridMismatchError("amplitudes and band structure use different k grids");
    }
    const std::size_t nk = bands.grid().size();
    const std::size_t pw = bands.plane_waves();
    const double dk = bands.grid().spacing();
    const double scale = dk / std::sqrt(two_pi);

    ComplexVector b(nk * pw, cplx{});
    for (std::size_t n = 0; n < amplitudes.num_bands(); ++n) {
        const auto a = amplitudes.band(n);
        for (std::size_t j = 0; j < nk; ++j) {
            if (a[j] == cplx{}) {
                continue;
            }
            const auto c = bands.coefficients(n, j);
            for (std::size_t m = 0; m < pw; ++m) {
                b[m * nk + j] += scale * a[j] * c[m];
            }
        }
    }

    // Drop leading and trailing momenta that carry nothing.
    std::size_t lo = 0;
    std::size_t hi = b.size();
    while (lo < hi && b[lo] == cplx{}) ++lo;
    while (hi > lo && b[hi - 1] == cplx{}) --hi;

    PositionWavepacket out;
    out.grid = x_grid;
    out.values.assign(x_grid.size(), cplx{});
    if (lo == hi) {
        return out;
    }
    const double q_lo = first_q(bands) + static_cast<double>(lo) * dk;

#pragma omp parallel for schedule(static)
    for (std::size_t l = 0; l < x_grid.size(); ++l) {
        const double x = x_grid.x(l);
        const cplx z = std::polar(1.0, dk * x);
        cplx s{};
        for (std::size_t i = hi; i-- > lo;) {
            s = s * z + b[i];
        }
        out.values[l] = std::polar(1.0, q_lo * x) * s;
    }
    return out;
}

MomentumState bloch_projection(const PositionWavepacket& packet, const BandStructure& bands, std::size_t num_bands)
{
    check_basis(bands, num_bands);
    const std::size_t nk = bands.grid().size();
    const std::size_t pw = bands.plane_waves();
    const double dk = bands.grid().spacing();
    const double q0 = first_q(bands);
    const XGrid& xg = packet.grid;
    const double dx = xg.spacing();
    const std::size_t nx = xg.size();

    ComplexVector psi_hat(nk * pw);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < psi_hat.size(); ++i) {
        const double q = q0 + static_cast<double>(i) * dk;
        const cplx w = std::polar(1.0, -q * dx);
        cplx s{};
        for (std::size_t l = nx; l-- > 0;) {
            s = s * w + packet.values[l];
        }
        psi_hat[i] = std::polar(dx, -q * xg.x_min()) * s;
    }

    const double scale = 1.0 / std::sqrt(two_pi);
    std::vector<ComplexVector> amps(num_bands, ComplexVector(nk));
    for (std::size_t n = 0; n < num_bands; ++n) {
        for (std::size_t j = 0; j < nk; ++j) {
            const auto c = bands.coefficients(n, j);
            cplx s{};
            for (std::size_t m = 0; m < pw; ++m) {
                s += std::conj(c[m]) * psi_hat[m * nk + j];
            }
            amps[n][j] = scale * s;
        }
    }
    return MomentumState(bands.grid(), std::move(amps));
}

namespace {

double widest_band(const MomentumState& init, const BandStructure& bands)
{
    double w = 0.0;
    for (std::size_t n = 0; n < init.num_bands() && n < bands.num_bands(); ++n) {
        w = std::max(w, bands.band_width(n));
    }
    return w;
}

} // namespace

XGrid default_x_grid(const MomentumState& init, const BandStructure& bands, double force)
{
    if (!(force > 0.0)) {
        throw InvalidArgument("force must be positive");
    }
    const double d = bands.period();
    // Packets that are already spread at tau = 0 need room for their own tails.
    const double spread = init.is_real_valued() ? std::sqrt(initial_spread(init)) : 0.0;
    const double extent = widest_band(init, bands) / force + 20.0 * d + 8.0 * spread;
    return XGrid::covering(-extent, extent, d / 16.0);
}

PositionWavepacket reconstruct(const MomentumState& init, const BandStructure& bands, double force, double tau,
                               const XGrid& x_grid, const EvolveOptions& options)
{
    check_basis(bands, init.num_bands());
    const DecoupledPropagator prop(bands, force, init.num_bands());
    const auto evolved = prop.evolve(init, tau, options);
    PositionWavepacket out = bloch_synthesis(evolved.state, bands, x_grid);
    out.tau = tau;

    const double d = bands.period();
    const double need = widest_band(init, bands) / force + 10.0 * d;
    const double span = static_cast<double>(bands.grid().size()) * d;
    const bool narrow = x_grid.x_min() > -need || x_grid.x_max() < need;
    const bool wide = x_grid.x_max() - x_grid.x_min() >= span;
    if (narrow || wide) {
        std::ostringstream msg;
        msg.precision(3);
        if (narrow) {
            msg << "x grid does not cover +-" << need << ";";
        }
        if (wide) {
            msg << " x grid is wider than the reconstruction period " << span << ";";
        }
        msg << " mass deficit " << 1.0 - out.norm();
        out.warnings.push_back(msg.str());
    }
    return out;
}

Moments direct_moments(const PositionWavepacket& packet, double edge_tolerance)
{
    const auto& v = packet.values;
    if (v.size() < 2) {
        throw InvalidArgument("direct_moments: packet needs at least two samples");
    }
    double peak = 0.0;
    for (const auto& a : v) {
        peak = std::max(peak, std::norm(a));
    }
    const double edge = std::max(std::norm(v.front()), std::norm(v.back()));
    if (edge > edge_tolerance * peak) {
        throw CoverageError("direct_moments: packet density at the grid edge is " + std::to_string(edge / peak) +
                            " of its peak");
    }
    const double dx = packet.grid.spacing();
    double m0 = 0.0;
    double m1 = 0.0;
    for (std::size_t l = 0; l < v.size(); ++l) {
        const double p = std::norm(v[l]);
        m0 += p;
        m1 += p * packet.grid.x(l);
    }
    const double mean = m1 / m0;
    double m2 = 0.0;
    for (std::size_t l = 0; l < v.size(); ++l) {
        const double y = packet.grid.x(l) - mean;
        m2 += std::norm(v[l]) * y * y;
    }
    return Moments{m0 * dx, mean, m2 / m0};
}

double mass_within(const PositionWavepacket& packet, double a, double b)
{
    if (!(a <= b)) {
        throw InvalidArgument("mass_within: interval is reversed");
    }
    const auto& g = packet.grid;
    const double half = 0.5 * g.spacing();
    if (a < g.x_min() - half || b > g.x_max() + half) {
        throw CoverageError("mass_within: interval exceeds the x grid");
    }
    if (a == b) {
        return 0.0;
    }
    double s = 0.0;
    for (std::size_t l = 0; l < g.size(); ++l) {
        const double x = g.x(l);
        if (x >= a && x <= b) {
            s += std::norm(packet.values[l]);
        }
    }
    return s * g.spacing();
}

} // namespace blochlab
