#include "support.hpp"

#include <blochlab/error.hpp>
#include <blochlab/initial_states.hpp>
#include <blochlab/momentum_dynamics.hpp>

#include <gtest/gtest.h>

using namespace blochlab;
using support::pi;

TEST(Wannier, FlatAmplitude)
{
    const auto s = wannier_state(1.0, 256);
    for (const auto& a : s.band(0)) EXPECT_NEAR(a.real(), 0.398942, 1e-6);
    EXPECT_NEAR(s.norm(), 1.0, 1e-14);
    EXPECT_NEAR(mean_crystal_momentum(s, 0.0), 0.0, 1e-14);
    EXPECT_TRUE(s.is_real_valued());
    EXPECT_EQ(s.tag().kind, StateKind::wannier);
}

TEST(Wannier, NormForAnyPeriodAndBand)
{
    for (double d : {0.5, 2.0, 3.7}) EXPECT_NEAR(wannier_state(d, 64).norm(), 1.0, 1e-13);
    const auto s = wannier_state(1.0, 32, 2);
    EXPECT_EQ(s.num_bands(), 3UL);
    for (const auto& a : s.band(0)) EXPECT_EQ(a, cplx{});
    EXPECT_NEAR(s.norm(), 1.0, 1e-14);
    EXPECT_THROW(wannier_state(1.0, 31), InvalidArgument);
    EXPECT_THROW(wannier_state(0.0, 32), InvalidArgument);
}

TEST(Gaussian, ClosedFormConstantAgainstErfSeries)
{
    EXPECT_NEAR(gaussian_constant(1.0, 1.0), 0.7511289, 1e-7);
    for (double rho : {0.1, 0.5, 1.0, 2.0}) {
        for (double d : {1.0, 2.0}) {
            const double ref = 1.0 / std::sqrt(std::sqrt(pi) * rho * support::erf_reference(pi / (rho * d)));
            EXPECT_NEAR(gaussian_constant(rho, d), ref, 1e-13) << rho << " " << d;
        }
    }
    EXPECT_THROW(gaussian_constant(-1.0, 1.0), InvalidArgument);
}

TEST(Gaussian, NarrowProfileIsNormalizedAndMatchesClosedForm)
{
    const auto s = gaussian_state(0.1, 0.0, 1.0, 256);
    EXPECT_NEAR(s.norm(), 1.0, 1e-12);
    EXPECT_NEAR(s.tag().raw_norm, 1.0, 1e-12);
    const double c = gaussian_constant(0.1, 1.0);
    const auto& g = s.grid();
    for (std::size_t j = 0; j < g.size(); j += 7) {
        const double k = g.k(j);
        EXPECT_NEAR(s.band(0)[j].real(), c * std::exp(-k * k / 0.02), 1e-10);
    }
}

TEST(Gaussian, WideProfileRecordsPeriodizationDeviation)
{
    const auto s = gaussian_state(1.0, 0.0, 1.0, 256);
    EXPECT_NEAR(s.norm(), 1.0, 1e-12);
    EXPECT_GT(std::abs(s.tag().raw_norm - 1.0), 1e-6);
}

TEST(Gaussian, EvenRealAndCentred)
{
    const auto s = gaussian_state(0.7, 0.0, 1.0, 128);
    EXPECT_TRUE(s.is_real_valued());
    for (std::size_t j = 1; j < 128; ++j) EXPECT_NEAR(s.band(0)[j].real(), s.band(0)[128 - j].real(), 1e-15);
    EXPECT_NEAR(mean_crystal_momentum(s, 0.0), 0.0, 1e-14);
}

TEST(Gaussian, VeryWideApproachesWannier)
{
    const auto g = gaussian_state(50.0, 0.0, 1.0, 256);
    const auto w = wannier_state(1.0, 256);
    double gap = 0.0;
    for (std::size_t j = 0; j < 256; ++j) gap = std::max(gap, std::abs(g.band(0)[j] - w.band(0)[j]));
    EXPECT_LT(gap / w.band(0)[0].real(), 0.01);
}

TEST(Gaussian, OffCentreMeanMomentum)
{
    const auto s = gaussian_state(0.05, 1.3, 1.0, 512);
    EXPECT_NEAR(mean_crystal_momentum(s, 1.3), 1.3, 1e-10);
    const auto wrapped = gaussian_state(0.05, 1.3 + 2 * pi, 1.0, 512);
    for (std::size_t j = 0; j < 512; ++j) EXPECT_NEAR(std::abs(wrapped.band(0)[j] - s.band(0)[j]), 0.0, 1e-12);
}

TEST(Gaussian, RejectsBadWidth)
{
    EXPECT_THROW(gaussian_state(0.0, 0.0, 1.0, 64), InvalidArgument);
    EXPECT_THROW(gaussian_state(-0.1, 0.0, 1.0, 64), InvalidArgument);
    EXPECT_THROW(gaussian_state(0.1, std::nan(""), 1.0, 64), InvalidArgument);
}

TEST(NearBloch, MinimumWidthAndCentroid)
{
    const ZoneGrid g(1.0, 256);
    const double w = 2 * g.spacing();
    const auto s = near_bloch_state(0.0, w, 1.0, 256);
    EXPECT_NEAR(s.norm(), 1.0, 1e-12);
    EXPECT_EQ(s.tag().kind, StateKind::near_bloch);
    EXPECT_DOUBLE_EQ(s.tag().width, w);
    const double k0 = g.k(150);
    EXPECT_NEAR(mean_crystal_momentum(near_bloch_state(k0, w, 1.0, 256), k0), k0, g.spacing() * g.spacing());
    EXPECT_THROW(near_bloch_state(0.0, 1.9 * g.spacing(), 1.0, 256), InvalidArgument);
}

TEST(MomentumState, NormalizeAndMismatch)
{
    MomentumState s(ZoneGrid(1.0, 4), {ComplexVector(4, cplx{1.0, 1.0})});
    const double before = s.normalize();
    EXPECT_NEAR(before, 2.0 * 4 * (2 * pi / 4), 1e-14);
    EXPECT_NEAR(s.norm(), 1.0, 1e-14);
    EXPECT_FALSE(s.is_real_valued());
    EXPECT_THROW(MomentumState(ZoneGrid(1.0, 4), {ComplexVector(3)}), GridMismatchError);
    MomentumState zero(ZoneGrid(1.0, 4), {ComplexVector(4)});
    EXPECT_THROW(zero.normalize(), InvalidArgument);
}

TEST(StateKindNames, RoundTrip)
{
    for (auto k : {StateKind::custom, StateKind::wannier, StateKind::gaussian, StateKind::near_bloch}) {
        EXPECT_EQ(state_kind_from_string(to_string(k)), k);
    }
    EXPECT_THROW(state_kind_from_string("plane"), InvalidArgument);
}
