#include "blochlab/momentum_dynamics.hpp"

#include "blochlab/error.hpp"
#include "blochlab/spectral.hpp"

#include <cmath>
#include <numbers>

namespace blochlab {

double phase_factor(const PhaseTable& table, double k, double tau)
{
    return -(table.antiderivative(k) - table.antiderivative(k - tau)) / table.force();
}

DecoupledPropagator::DecoupledPropagator(BandStructure bands, double force, std::size_t num_bands)
    : bands_(std::move(bands)), force_(force)
{
    if (!(force > 0.0) || !std::isfinite(force)) {
        throw InvalidArgument("force must be positive and finite");
    }
    if (num_bands > bands_.num_bands()) {
        throw InvalidArgument("state occupies more bands than the band structure provides");
    }
    tables_.reserve(num_bands);
    for (std::size_t n = 0; n < num_bands; ++n) {
        tables_.push_back(band_antiderivative(bands_, force_, n));
    }
}

RealVector DecoupledPropagator::phases(std::size_t n, double tau, const EvolveOptions& options) const
{
    const PhaseTable& t = tables_.at(n);
    const ZoneGrid& grid = bands_.grid();
    const std::size_t nk = grid.size();
    RealVector theta(nk);
    long s = 0;
    if (grid.commensurate(tau, s, options.commensurate_tolerance)) {
        const long ln = static_cast<long>(nk);
        const double ramp = t.zone_average() * static_cast<double>(s) * grid.spacing();
        for (std::size_t j = 0; j < nk; ++j) {
            const long src = ((static_cast<long>(j) - s) % ln + ln) % ln;
            const double da = ramp + t.periodic_part(j) - t.periodic_part(static_cast<std::size_t>(src));
            theta[j] = -da / force_;
        }
        return theta;
    }
    if (!options.interpolate) {
        throw IncommensurateTimeError("tau is not a multiple of the k spacing; enable interpolation");
    }
    const RealVector back = t.periodic_part_shifted(-tau);
    for (std::size_t j = 0; j < nk; ++j) {
        theta[j] = -(t.zone_average() * tau + t.periodic_part(j) - back[j]) / force_;
    }
    return theta;
}

EvolvedState DecoupledPropagator::evolve(const MomentumState& init, double tau, const EvolveOptions& options) const
{
    if (!(init.grid() == bands_.grid())) {
        throw GridMismatchError("state and band structure use different k grids");
    }
    if (init.num_bands() > tables_.size()) {
        throw InvalidArgument("state occupies more bands than the propagator was built for");
    }
    if (!std::isfinite(tau)) {
        throw InvalidArgument("tau must be finite");
    }
    if (tau == 0.0) {
        return EvolvedState{init, tau, force_};
    }
    const ZoneGrid& grid = bands_.grid();
    const std::size_t nk = grid.size();
    long s = 0;
    const bool exact = grid.commensurate(tau, s, options.commensurate_tolerance);
    if (!exact && !options.interpolate) {
        throw IncommensurateTimeError("tau is not a multiple of the k spacing; enable interpolation");
    }

    std::vector<ComplexVector> out(init.num_bands(), ComplexVector(nk));
    for (std::size_t n = 0; n < init.num_bands(); ++n) {
        const auto src = init.band(n);
        const RealVector theta = phases(n, tau, options);
        ComplexVector moved(nk);
        if (exact) {
            const long ln = static_cast<long>(nk);
            for (std::size_t j = 0; j < nk; ++j) {
                moved[j] = src[static_cast<std::size_t>(((static_cast<long>(j) - s) % ln + ln) % ln)];
            }
        } else {
            moved = spectral::TrigSeries(src, grid.start(), grid.width()).shifted(-tau);
        }
        auto& row = out[n];
#pragma omp parallel for schedule(static)
        for (std::size_t j = 0; j < nk; ++j) {
            row[j] = std::polar(1.0, theta[j]) * moved[j];
        }
    }
    return EvolvedState{MomentumState(grid, std::move(out), init.tag()), tau, force_};
}

EvolvedState evolve_decoupled(const MomentumState& init, const BandStructure& bands, double force, double tau,
                              const EvolveOptions& options)
{
    return DecoupledPropagator(bands, force, init.num_bands()).evolve(init, tau, options);
}

double mean_crystal_momentum(const MomentumState& state, double branch_center)
{
    const ZoneGrid& grid = state.grid();
    const double w = grid.width();
    const double lo = branch_center - 0.5 * w;
    const double tie = 1e-9 * grid.spacing();
    double acc = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double r = grid.k(j) - lo;
        r -= w * std::floor(r / w);
        const double kt = (r < tie || w - r < tie) ? branch_center : lo + r;
        double weight = 0.0;
        for (std::size_t n = 0; n < state.num_bands(); ++n) {
            weight += std::norm(state.band(n)[j]);
        }
        acc += kt * weight;
    }
    return acc * grid.spacing();
}

} // namespace blochlab
