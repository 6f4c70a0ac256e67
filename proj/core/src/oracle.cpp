#include "blochlab/oracle.hpp"

#include "blochlab/error.hpp"
#include "blochlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace blochlab {

void OracleConfig::validate() const
{
    if (!(half_length > 0.0) || points < 16 || points % 2 != 0) {
        throw InvalidArgument("OracleConfig: need half_length > 0 and an even point count >= 16");
    }
    if (!(dtau > 0.0)) {
        throw InvalidArgument("OracleConfig: dtau must be positive");
    }
    if (splitting_order != 2 && splitting_order != 4) {
        throw InvalidArgument("OracleConfig: splitting_order must be 2 or 4");
    }
    if (!(absorber_fraction >= 0.0 && absorber_fraction < 0.5)) {
        throw InvalidArgument("OracleConfig: absorber_fraction must lie in [0, 0.5)");
    }
    if (!(absorber_strength >= 0.0 && absorber_strength <= 1.0)) {
        throw InvalidArgument("OracleConfig: absorber_strength must lie in [0, 1]");
    }
    if (!(absorbed_budget >= 0.0) || !(halving_tolerance > 0.0)) {
        throw InvalidArgument("OracleConfig: budgets must be non-negative");
    }
}

PositionWavepacket synthesize_position_state(const MomentumState& init, const BandStructure& bands,
                                             const XGrid& x_grid)
{
    PositionWavepacket p = bloch_synthesis(init, bands, x_grid);
    p.tau = 0.0;
    return p;
}

namespace {

class SplitStepper {
  public:
    SplitStepper(const CrystalPotential& pot, const UnitSystem& units, double force, const XGrid& grid,
                 const OracleConfig& cfg)
        : fft_(grid.size()), force_(force), kinetic_(units.kinetic_coeff), order_(cfg.splitting_order)
    {
        const std::size_t n = grid.size();
        potential_.resize(n);
        mask_.assign(n, 1.0);
        wavenumber2_.resize(n);
        const double box = grid.spacing() * static_cast<double>(n);
        const double ramp = cfg.absorber_fraction * box;
        for (std::size_t l = 0; l < n; ++l) {
            const double x = grid.x(l);
            potential_[l] = pot(x) - force * x;
            const double from_edge = std::min(x - grid.x_min(), grid.x_min() + box - x);
            if (ramp > 0.0 && from_edge < ramp) {
                const double s = std::sin(0.5 * std::numbers::pi * (1.0 - from_edge / ramp));
                mask_[l] = 1.0 - cfg.absorber_strength * s * s;
            }
            const long m = l < n / 2 ? static_cast<long>(l) : static_cast<long>(l) - static_cast<long>(n);
            const double kappa = two_pi * static_cast<double>(m) / box;
            wavenumber2_[l] = kappa * kappa;
        }
        work_.resize(n);
    }

    void set_step(double h)
    {
        if (h == step_) {
            return;
        }
        step_ = h;
        RealVector subs;
        if (order_ == 4) {
            const double cbrt2 = std::cbrt(2.0);
            const double w1 = 1.0 / (2.0 - cbrt2);
            const double w0 = -cbrt2 / (2.0 - cbrt2);
            subs = {w1 * h, w0 * h, w1 * h};
        } else {
            subs = {h};
        }
        const std::size_t n = potential_.size();
        half_potential_.assign(subs.size(), ComplexVector(n));
        kinetic_factor_.assign(subs.size(), ComplexVector(n));
        for (std::size_t s = 0; s < subs.size(); ++s) {
            for (std::size_t l = 0; l < n; ++l) {
                half_potential_[s][l] = std::polar(1.0, -potential_[l] * subs[s] / (2.0 * force_));
                kinetic_factor_[s][l] =
                    std::polar(1.0 / static_cast<double>(n), -kinetic_ * wavenumber2_[l] * subs[s] / force_);
            }
        }
    }

    /// One composed step followed by the mask; returns the probability removed.
    double advance(ComplexVector& psi, double dx)
    {
        const std::size_t n = psi.size();
        for (std::size_t s = 0; s < half_potential_.size(); ++s) {
            const auto& hp = half_potential_[s];
            const auto& kf = kinetic_factor_[s];
            for (std::size_t l = 0; l < n; ++l) psi[l] *= hp[l];
            fft_.forward(psi, work_);
            for (std::size_t l = 0; l < n; ++l) work_[l] *= kf[l];
            fft_.backward(work_, psi);
            for (std::size_t l = 0; l < n; ++l) psi[l] *= hp[l];
        }
        double removed = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
            if (mask_[l] < 1.0) {
                const double before = std::norm(psi[l]);
                psi[l] *= mask_[l];
                removed += before - std::norm(psi[l]);
            }
        }
        return removed * dx;
    }

    double mass_under_mask(const ComplexVector& psi, double dx) const
    {
        double s = 0.0;
        for (std::size_t l = 0; l < psi.size(); ++l) {
            if (mask_[l] < 1.0) s += std::norm(psi[l]);
        }
        return s * dx;
    }

  private:
    spectral::Fft fft_;
    double force_;
    double kinetic_;
    int order_;
    RealVector potential_;
    RealVector mask_;
    RealVector wavenumber2_;
    ComplexVector work_;
    double step_ = -1.0;
    std::vector<ComplexVector> half_potential_;
    std::vector<ComplexVector> kinetic_factor_;
};

OracleRun integrate(const CrystalPotential& pot, const UnitSystem& units, double force,
                    const PositionWavepacket& psi0, std::span<const double> tau_grid, const OracleConfig& cfg)
{
    SplitStepper stepper(pot, units, force, psi0.grid, cfg);
    const double dx = psi0.grid.spacing();
    OracleRun run;
    ComplexVector psi = psi0.values;
    double now = psi0.tau;
    for (const double target : tau_grid) {
        const double span = target - now;
        const auto steps = static_cast<std::size_t>(std::ceil(span / cfg.dtau - 1e-9));
        if (steps > 0) {
            stepper.set_step(span / static_cast<double>(steps));
            for (std::size_t s = 0; s < steps; ++s) {
                run.absorbed += stepper.advance(psi, dx);
            }
            run.steps += steps;
        }
        now = target;
        run.snapshots.push_back(PositionWavepacket{psi0.grid, psi, target, {}});
    }
    return run;
}

} // namespace

OracleRun split_step_evolve(const CrystalPotential& pot, const UnitSystem& units, double force,
                            const PositionWavepacket& psi0, std::span<const double> tau_grid, const OracleConfig& cfg)
{
    cfg.validate();
    units.validate();
    if (!(force >= 0.0) || !std::isfinite(force)) {
        throw InvalidArgument("split_step_evolve: force must be non-negative and finite");
    }
    if (force == 0.0) {
        throw InvalidArgument("split_step_evolve: rescaled time needs F > 0");
    }
    if (!(psi0.grid == cfg.box())) {
        throw GridMismatchError("split_step_evolve: initial packet is not sampled on the oracle box");
    }
    if (!std::is_sorted(tau_grid.begin(), tau_grid.end()) || (!tau_grid.empty() && tau_grid.front() < psi0.tau)) {
        throw InvalidArgument("split_step_evolve: tau samples must be sorted and not precede the initial state");
    }
    {
        SplitStepper probe(pot, units, force, psi0.grid, cfg);
        const double edge = probe.mass_under_mask(psi0.values, psi0.grid.spacing());
        if (edge > cfg.absorbed_budget) {
            throw CoverageError("split_step_evolve: initial packet already has " + std::to_string(edge) +
                                " probability under the absorber");
        }
    }

    OracleRun run = integrate(pot, units, force, psi0, tau_grid, cfg);
    if (run.absorbed > cfg.absorbed_budget) {
        std::ostringstream msg;
        msg << "split_step_evolve: absorbed probability " << run.absorbed << " exceeds budget " << cfg.absorbed_budget;
        throw OracleBudgetError(msg.str());
    }
    if (cfg.check_halving && !run.snapshots.empty()) {
        OracleConfig half = cfg;
        half.dtau = 0.5 * cfg.dtau;
        const OracleRun fine = integrate(pot, units, force, psi0, tau_grid, half);
        const auto& a = run.snapshots.back().values;
        const auto& b = fine.snapshots.back().values;
        double s = 0.0;
        for (std::size_t l = 0; l < a.size(); ++l) {
            s += std::norm(a[l] - b[l]);
        }
        run.halving_discrepancy = std::sqrt(s * psi0.grid.spacing());
        if (run.halving_discrepancy > cfg.halving_tolerance) {
            std::ostringstream msg;
            msg << "split_step_evolve: step halving moved the terminal state by " << run.halving_discrepancy;
            throw OracleBudgetError(msg.str());
        }
    }
    return run;
}

Projection project_to_bands(const PositionWavepacket& packet, const BandStructure& bands, std::size_t num_bands,
                            double max_residual)
{
    Projection p{bloch_projection(packet, bands, num_bands), 0.0};
    p.residual = packet.norm() - p.state.norm();
    if (p.residual > max_residual) {
        std::ostringstream msg;
        msg << "project_to_bands: " << p.residual << " of the norm lies outside the first " << num_bands << " bands";
        throw ResidualError(msg.str());
    }
    return p;
}

double fidelity(const MomentumState& a, const MomentumState& b)
{
    if (!(a.grid() == b.grid())) {
        throw GridMismatchError("fidelity: states live on different k grids");
    }
    cplx s{};
    const std::size_t common = std::min(a.num_bands(), b.num_bands());
    for (std::size_t n = 0; n < common; ++n) {
        const auto x = a.band(n);
        const auto y = b.band(n);
        for (std::size_t j = 0; j < x.size(); ++j) {
            s += std::conj(x[j]) * y[j];
        }
    }
    return std::abs(s) * a.grid().spacing();
}

} // namespace blochlab
