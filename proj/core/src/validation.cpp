#include "blochlab/validation.hpp"

#include "blochlab/error.hpp"
#include "blochlab/momentum_dynamics.hpp"
#include "blochlab/observables.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace blochlab {

FidelityPoint decoupled_vs_oracle(const CrystalPotential& pot, const UnitSystem& units, const BandStructure& bands,
                                  const MomentumState& init, double force, const OracleConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    const double d = bands.period();
    const double period_x = static_cast<double>(bands.grid().size()) * d;
    if (2.0 * cfg.half_length > period_x * (1.0 + 1e-12)) {
        throw InvalidArgument("oracle box is longer than the period N_k d of the synthesized packet");
    }
    const double tau_b = two_pi / d;
    const PositionWavepacket psi0 = synthesize_position_state(init, bands, cfg.box());
    const double taus[] = {tau_b};
    const OracleRun run = split_step_evolve(pot, units, force, psi0, taus, cfg);
    const Projection proj =
        project_to_bands(run.snapshots.back(), bands, init.num_bands(), std::numeric_limits<double>::infinity());
    const MomentumState decoupled = evolve_decoupled(init, bands, force, tau_b).state;

    FidelityPoint p;
    p.force = force;
    p.fidelity = fidelity(decoupled, proj.state);
    p.residual = proj.residual;
    p.absorbed = run.absorbed;
    p.steps = run.steps;
    p.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return p;
}

double ReconstructionCheck::centroid_error() const
{
    return std::abs(direct_centroid_shift - closed_centroid_shift) / std::abs(closed_centroid_shift);
}

double ReconstructionCheck::variance_error() const
{
    return std::abs(direct_variance_shift - closed_variance_shift) / std::abs(closed_variance_shift);
}

namespace {

PositionWavepacket unphased(const MomentumState& init, const BandStructure& bands, double tau, const XGrid& x_grid)
{
    const ZoneGrid& grid = init.grid();
    long s = 0;
    if (!grid.commensurate(tau, s)) {
        throw IncommensurateTimeError("negative control needs a commensurate tau");
    }
    const long nk = static_cast<long>(grid.size());
    std::vector<ComplexVector> amps(init.num_bands(), ComplexVector(grid.size()));
    for (std::size_t n = 0; n < init.num_bands(); ++n) {
        for (long j = 0; j < nk; ++j) {
            amps[n][static_cast<std::size_t>(j)] = init.band(n)[static_cast<std::size_t>(((j - s) % nk + nk) % nk)];
        }
    }
    PositionWavepacket p = bloch_synthesis(MomentumState(grid, std::move(amps)), bands, x_grid);
    p.tau = tau;
    return p;
}

} // namespace

ReconstructionCheck reconstruction_crosscheck(const MomentumState& init, const BandStructure& bands, double force,
                                              double tau, const XGrid& x_grid, bool keep_phase)
{
    const Moments m0 = direct_moments(reconstruct(init, bands, force, 0.0, x_grid));
    const PositionWavepacket pk =
        keep_phase ? reconstruct(init, bands, force, tau, x_grid) : unphased(init, bands, tau, x_grid);
    const Moments m1 = direct_moments(pk);

    ReconstructionCheck c;
    c.tau = tau;
    c.direct_centroid_shift = m1.mean - m0.mean;
    c.closed_centroid_shift = centroid_shift(init, bands, force, tau);
    c.direct_variance_shift = m1.variance - m0.variance;
    c.closed_variance_shift = variance_shift(init, bands, force, tau);
    c.norm = m1.norm;
    return c;
}

double breathing_mass(const MomentumState& init, const BandStructure& bands, double force, double tau, double margin,
                      const XGrid& x_grid)
{
    const double chi = localization_interval(bands, 0, tau);
    const double half = chi / force + margin;
    return mass_within(reconstruct(init, bands, force, tau, x_grid), -half, half);
}

} // namespace blochlab
