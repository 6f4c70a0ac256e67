#include "support.hpp"

#include <blochlab/error.hpp>
#include <blochlab/initial_states.hpp>
#include <blochlab/momentum_dynamics.hpp>
#include <blochlab/observables.hpp>
#include <blochlab/oracle.hpp>
#include <blochlab/position_space.hpp>
#include <blochlab/validation.hpp>

#include <gtest/gtest.h>

using namespace blochlab;
using support::pi;

namespace {

constexpr double force = 0.5;

// The theta = 0 control: translate the amplitudes but drop the phase factor.
PositionWavepacket without_phase(const MomentumState& init, const BandStructure& bands, long shift, const XGrid& xg)
{
    const auto nk = static_cast<long>(init.grid().size());
    std::vector<ComplexVector> amps(init.num_bands(), ComplexVector(init.grid().size()));
    for (std::size_t n = 0; n < init.num_bands(); ++n) {
        for (long j = 0; j < nk; ++j) {
            amps[n][static_cast<std::size_t>(j)] = init.band(n)[static_cast<std::size_t>(((j - shift) % nk + nk) % nk)];
        }
    }
    return bloch_synthesis(MomentumState(init.grid(), std::move(amps)), bands, xg);
}

double max_distance(const MomentumState& a, const MomentumState& b)
{
    double worst = 0.0;
    for (std::size_t n = 0; n < std::min(a.num_bands(), b.num_bands()); ++n) {
        for (std::size_t j = 0; j < a.grid().size(); ++j) worst = std::max(worst, std::abs(a.band(n)[j] - b.band(n)[j]));
    }
    return worst;
}

} // namespace

TEST(DefaultGrid, SpacingAndExtent)
{
    const auto& b = support::moderate_bands();
    const auto w = wannier_state(1.0, 64);
    const XGrid xg = default_x_grid(w, b, force);
    EXPECT_DOUBLE_EQ(xg.spacing(), 1.0 / 16);
    EXPECT_LE(xg.x_min(), -(b.band_width(0) / force + 20.0));
    EXPECT_GE(xg.x_max(), b.band_width(0) / force + 20.0);
    const XGrid wide = default_x_grid(gaussian_state(0.3, 0.0, 1.0, 64), b, force);
    EXPECT_GT(wide.x_max(), xg.x_max());
    EXPECT_THROW(default_x_grid(w, b, 0.0), InvalidArgument);
}

TEST(Reconstruct, WannierRoundTripAndNorm)
{
    const auto& b = support::moderate_bands();
    const auto w = wannier_state(1.0, 64);
    const XGrid xg = default_x_grid(w, b, force);
    const auto p = reconstruct(w, b, force, 0.0, xg);
    EXPECT_TRUE(p.warnings.empty());
    EXPECT_NEAR(p.norm(), 1.0, 1e-6);
    const auto back = bloch_projection(p, b, 2);
    EXPECT_LT(max_distance(back, w), 1e-8);
    for (const auto& a : back.band(1)) EXPECT_LT(std::abs(a), 1e-8);
}

TEST(Reconstruct, BlochPeriodRecurrenceOfModulus)
{
    const auto& b = support::moderate_bands();
    const auto g = gaussian_state(0.5, 0.0, 1.0, 64);
    const XGrid xg = default_x_grid(g, b, force);
    const auto p0 = reconstruct(g, b, force, 0.0, xg);
    const auto p1 = reconstruct(g, b, force, 2 * pi, xg);
    for (std::size_t l = 0; l < xg.size(); ++l) EXPECT_NEAR(std::abs(p1.values[l]), std::abs(p0.values[l]), 1e-6);
}

TEST(Reconstruct, ProjectionRecoversEvolvedAmplitudes)
{
    const auto& b = support::moderate_bands();
    const auto g = gaussian_state(0.5, 0.3, 1.0, 64);
    const XGrid xg = default_x_grid(g, b, force);
    const double tau = 21 * b.grid().spacing();
    const auto evolved = evolve_decoupled(g, b, force, tau).state;
    const auto back = bloch_projection(reconstruct(g, b, force, tau, xg), b, 1);
    EXPECT_GE(fidelity(back, evolved), 1 - 1e-6);
}

TEST(Reconstruct, WarnsOnNarrowGridAndNeedsBasis)
{
    const auto& b = support::moderate_bands();
    const auto w = wannier_state(1.0, 64);
    const auto p = reconstruct(w, b, force, 0.0, XGrid::covering(-5.0, 5.0, 1.0 / 16));
    ASSERT_EQ(p.warnings.size(), 1UL);
    EXPECT_NE(p.warnings[0].find("mass deficit"), std::string::npos);
    const auto a = analytic_cosine_band(1.0, 1.0, 64);
    EXPECT_THROW(reconstruct(w, a, force, 0.0, XGrid::covering(-5.0, 5.0, 0.1)), MissingBasisError);
    EXPECT_THROW(bloch_projection(p, b, 3), InvalidArgument);
}

TEST(Moments, SymmetricPacketAndCoverage)
{
    const auto& b = support::moderate_bands();
    const auto w = wannier_state(1.0, 64);
    const XGrid xg = default_x_grid(w, b, force);
    const auto p = reconstruct(w, b, force, 0.0, xg);
    const Moments m = direct_moments(p);
    EXPECT_NEAR(m.norm, 1.0, 1e-6);
    EXPECT_NEAR(m.mean, 0.0, 1e-12);
    EXPECT_GT(m.variance, 0.0);
    const auto narrow = reconstruct(w, b, force, pi, XGrid::covering(-3.0, 3.0, 1.0 / 16));
    EXPECT_THROW(direct_moments(narrow), CoverageError);
}

TEST(Moments, WannierVarianceGrowthMatchesClosedForm)
{
    const auto& b = support::moderate_bands();
    const auto w = wannier_state(1.0, 64);
    const XGrid xg = default_x_grid(w, b, force);
    const double s0 = direct_moments(reconstruct(w, b, force, 0.0, xg)).variance;
    const double s1 = direct_moments(reconstruct(w, b, force, pi, xg)).variance;
    const double closed = variance_shift(w, b, force, pi);
    EXPECT_NEAR(s1 - s0, closed, 1e-6 * closed);
}

TEST(Moments, CentroidNeedsThePhaseFactor)
{
    const auto& b = support::moderate_bands();
    const auto g = gaussian_state(0.3, 0.0, 1.0, 64);
    // The default grid would exceed the 64-cell reconstruction period here.
    const XGrid xg = XGrid::covering(-31.0, 31.0, 1.0 / 16);
    const long shift = 16;
    const double tau = shift * b.grid().spacing();
    const double closed = centroid_shift(g, b, force, tau);
    const double x0 = direct_moments(reconstruct(g, b, force, 0.0, xg)).mean;
    const double with_phase = direct_moments(reconstruct(g, b, force, tau, xg)).mean - x0;
    const double without = direct_moments(without_phase(g, b, shift, xg)).mean - x0;
    EXPECT_NEAR(with_phase, closed, 0.02 * std::abs(closed));
    EXPECT_GT(std::abs(without - closed), 10 * 0.02 * std::abs(closed));

    const auto check = reconstruction_crosscheck(g, b, force, tau, xg, false);
    EXPECT_NEAR(check.direct_centroid_shift, without, 1e-12);
}

TEST(MassWithin, IntervalsAndErrors)
{
    const auto& b = support::moderate_bands();
    const auto w = wannier_state(1.0, 64);
    const XGrid xg = default_x_grid(w, b, force);
    const auto p = reconstruct(w, b, force, pi, xg);
    EXPECT_NEAR(mass_within(p, xg.x_min(), xg.x_max()), 1.0, 1e-6);
    EXPECT_EQ(mass_within(p, 1.0, 1.0), 0.0);
    EXPECT_THROW(mass_within(p, 1.0, 0.0), InvalidArgument);
    EXPECT_THROW(mass_within(p, xg.x_min() - 1.0, 0.0), CoverageError);
    const double chi = localization_interval(b, 0, pi);
    EXPECT_GE(mass_within(p, -chi / force - 10.0, chi / force + 10.0), 0.99);
}
