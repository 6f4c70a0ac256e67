#include "blochlab/observables.hpp"

#include "blochlab/error.hpp"
#include "blochlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>

namespace blochlab {

namespace {

void check_pair(const MomentumState& state, const BandStructure& bands)
{
    if (!(state.grid() == bands.grid())) {
        throw GridMismatchError("state and band structure use different k grids");
    }
    if (state.num_bands() > bands.num_bands()) {
        throw InvalidArgument("state occupies more bands than the band structure provides");
    }
}

void check_force(double force)
{
    if (!(force > 0.0) || !std::isfinite(force)) {
        throw InvalidArgument("force must be positive and finite");
    }
}

void require_real(const MomentumState& state, const char* who)
{
    if (!state.is_real_valued()) {
        throw NotRealValuedError(std::string(who) + ": initial amplitudes must be real-valued");
    }
}

// sum_n sum_j |phi_n(k_j)|^2 f_n(k_j) dk, with f_n supplied per band.
template <class BandFn>
double weighted_mean(const MomentumState& state, BandFn&& values)
{
    double acc = 0.0;
    for (std::size_t n = 0; n < state.num_bands(); ++n) {
        const auto amp = state.band(n);
        const RealVector f = values(n);
        for (std::size_t j = 0; j < amp.size(); ++j) {
            acc += std::norm(amp[j]) * f[j];
        }
    }
    return acc * state.grid().spacing();
}

double excursion_moment(const MomentumState& init, const BandStructure& bands, double tau, int power)
{
    return weighted_mean(init, [&](std::size_t n) {
        RealVector f = bands.energies_shifted(n, tau);
        const auto e = bands.energies(n);
        for (std::size_t j = 0; j < f.size(); ++j) {
            f[j] = std::pow(f[j] - e[j], power);
        }
        return f;
    });
}

std::size_t dominant_band(const MomentumState& state)
{
    std::size_t best = 0;
    double weight = -1.0;
    for (std::size_t n = 0; n < state.num_bands(); ++n) {
        double w = 0.0;
        for (const auto& a : state.band(n)) {
            w += std::norm(a);
        }
        if (w > weight) {
            weight = w;
            best = n;
        }
    }
    return best;
}

} // namespace

double centroid_shift(const MomentumState& init, const BandStructure& bands, double force, double tau)
{
    check_pair(init, bands);
    check_force(force);
    if (tau == 0.0) {
        return 0.0;
    }
    return excursion_moment(init, bands, tau, 1) / force;
}

double mean_band_energy(const MomentumState& state, const BandStructure& bands)
{
    check_pair(state, bands);
    return weighted_mean(state, [&](std::size_t n) {
        const auto e = bands.energies(n);
        return RealVector(e.begin(), e.end());
    });
}

double representation_centroid(const MomentumState& state)
{
    double acc = 0.0;
    for (std::size_t n = 0; n < state.num_bands(); ++n) {
        const auto amp = state.band(n);
        const ComplexVector d = spectral::derivative(amp, state.grid().width());
        for (std::size_t j = 0; j < amp.size(); ++j) {
            acc += (std::conj(amp[j]) * cplx(0.0, 1.0) * d[j]).real();
        }
    }
    return acc * state.grid().spacing();
}

double variance_shift(const MomentumState& init, const BandStructure& bands, double force, double tau)
{
    check_pair(init, bands);
    check_force(force);
    require_real(init, "variance_shift");
    if (tau == 0.0) {
        return 0.0;
    }
    const double dx = excursion_moment(init, bands, tau, 1) / force;
    const double x0 = representation_centroid(init);
    const double second = excursion_moment(init, bands, tau, 2) / (force * force);
    return -dx * dx - 2.0 * x0 * dx + second;
}

double initial_spread(const MomentumState& init)
{
    require_real(init, "initial_spread");
    double acc = 0.0;
    for (std::size_t n = 0; n < init.num_bands(); ++n) {
        const ComplexVector d = spectral::derivative(init.band(n), init.grid().width());
        for (const auto& v : d) {
            acc += std::norm(v);
        }
    }
    return acc * init.grid().spacing();
}

double mean_velocity(const MomentumState& init, const BandStructure& bands, double tau, const UnitSystem& units)
{
    check_pair(init, bands);
    units.validate();
    return weighted_mean(init, [&](std::size_t n) { return bands.energies_shifted(n, tau, 1); }) / units.hbar;
}

double mean_acceleration(const MomentumState& init, const BandStructure& bands, double force, double tau,
                         const UnitSystem& units)
{
    check_pair(init, bands);
    check_force(force);
    units.validate();
    const double curvature = weighted_mean(init, [&](std::size_t n) { return bands.energies_shifted(n, tau, 2); });
    return force * curvature / (units.hbar * units.hbar);
}

double localization_interval(const BandStructure& bands, std::size_t n, double tau)
{
    if (n >= bands.num_bands()) {
        throw InvalidArgument("localization_interval: band index out of range");
    }
    if (tau == 0.0) {
        return 0.0;
    }
    const ZoneGrid& grid = bands.grid();
    const std::size_t nk = grid.size();
    const auto e = bands.energies(n);
    const RealVector back = bands.energies_shifted(n, -tau);
    RealVector g(nk);
    for (std::size_t j = 0; j < nk; ++j) {
        g[j] = e[j] - back[j];
    }
    const std::size_t jm = static_cast<std::size_t>(std::max_element(g.begin(), g.end()) - g.begin());
    const double ym = g[(jm + nk - 1) % nk];
    const double y0 = g[jm];
    const double yp = g[(jm + 1) % nk];
    const double h = grid.spacing();

    double k = grid.k(jm);
    const double curv = ym - 2.0 * y0 + yp;
    if (curv < 0.0) {
        k += h * std::clamp(0.5 * (ym - yp) / curv, -1.0, 1.0);
    }
    auto value = [&](double q) { return bands.energy(n, q) - bands.energy(n, q - tau); };
    for (int it = 0; it < 30; ++it) {
        const double d1 = bands.energy(n, k, 1) - bands.energy(n, k - tau, 1);
        const double d2 = bands.energy(n, k, 2) - bands.energy(n, k - tau, 2);
        if (!(d2 < 0.0)) {
            break;
        }
        const double step = std::clamp(-d1 / d2, -h, h);
        k += step;
        if (std::abs(step) < 1e-15 * grid.width()) {
            break;
        }
    }
    return std::max({value(k), y0, 0.0});
}

ObservableTrace trace(const MomentumState& init, const BandStructure& bands, double force,
                      std::span<const double> tau_grid, const UnitSystem& units, const TraceOptions& options)
{
    check_pair(init, bands);
    check_force(force);
    units.validate();
    require_real(init, "trace");
    if (!std::is_sorted(tau_grid.begin(), tau_grid.end())) {
        throw InvalidArgument("trace: tau samples must be sorted");
    }
    const std::size_t chi_band = options.chi_band < 0 ? dominant_band(init) : static_cast<std::size_t>(options.chi_band);
    if (chi_band >= bands.num_bands()) {
        throw InvalidArgument("trace: chi band out of range");
    }

    const DecoupledPropagator prop(bands, force, init.num_bands());
    const double k0 = mean_crystal_momentum(init, init.tag().center);
    const std::size_t rows = tau_grid.size();

    ObservableTrace out;
    out.tau.assign(tau_grid.begin(), tau_grid.end());
    out.mean_k.resize(rows);
    out.centroid_shift.resize(rows);
    out.variance_shift.resize(rows);
    out.sigma.resize(rows);
    out.chi.resize(rows);
    out.initial_spread = initial_spread(init);

    std::exception_ptr failure;
    std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t r = 0; r < rows; ++r) {
        try {
            const double tau = tau_grid[r];
            const auto evolved = prop.evolve(init, tau, options.evolve);
            out.mean_k[r] = mean_crystal_momentum(evolved.state, k0 + tau);
            out.centroid_shift[r] = centroid_shift(init, bands, force, tau);
            out.variance_shift[r] = variance_shift(init, bands, force, tau);
            out.sigma[r] = std::sqrt(std::max(0.0, out.initial_spread + out.variance_shift[r]));
            out.chi[r] = localization_interval(bands, chi_band, tau);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return out;
}

} // namespace blochlab
