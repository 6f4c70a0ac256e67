#include "support.hpp"

#include <blochlab/initial_states.hpp>
#include <blochlab/momentum_dynamics.hpp>
#include <blochlab/observables.hpp>
#include <blochlab/oracle.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace blochlab;
using support::pi;

namespace {

// Hermitian V_{-3}..V_{3} with V_0 = 0 and random moderate strength.
CrystalPotential random_potential(std::mt19937& rng, double period)
{
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    ComplexVector c(7);
    for (int m = 1; m <= 3; ++m) {
        const cplx v{u(rng), u(rng)};
        c[3 + m] = v;
        c[3 - m] = std::conj(v);
    }
    return CrystalPotential(period, c);
}

MomentumState random_state(std::mt19937& rng, const ZoneGrid& g, std::size_t bands)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<ComplexVector> amps(bands, ComplexVector(g.size()));
    for (auto& row : amps) {
        // Smooth profile: a few random low harmonics.
        cplx a[4];
        for (auto& x : a) x = {u(rng), u(rng)};
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double k = g.k(j) * g.period();
            row[j] = a[0] + a[1] * std::exp(cplx{0, k}) + a[2] * std::exp(cplx{0, -k}) + a[3] * std::exp(cplx{0, 2 * k});
        }
    }
    MomentumState s(g, std::move(amps));
    s.normalize();
    return s;
}

} // namespace

class RandomLattice : public ::testing::TestWithParam<unsigned> {};

TEST_P(RandomLattice, OrthonormalAndPeriodicBands)
{
    std::mt19937 rng(GetParam());
    const double d = (GetParam() % 2 == 0) ? 1.0 : 2.0;
    const auto b = solve_bands(random_potential(rng, d), {}, support::solve_options(32, 12, 3));
    const auto& g = b.grid();
    for (std::size_t j = 0; j < g.size(); j += 5) {
        for (std::size_t n = 0; n < 3; ++n) {
            for (std::size_t m = 0; m < 3; ++m) {
                const auto a = b.coefficients(n, j), c = b.coefficients(m, j);
                cplx s{};
                for (std::size_t p = 0; p < a.size(); ++p) s += std::conj(a[p]) * c[p];
                EXPECT_NEAR(std::abs(s - cplx(n == m ? 1.0 : 0.0)), 0.0, 1e-12);
            }
        }
    }
    for (std::size_t n = 0; n < 3; ++n) {
        for (double k : {-2.2 / d, 0.3 / d, 1.4 / d}) {
            EXPECT_NEAR(b.energy(n, k), b.energy(n, k + 2 * pi / d), 1e-9);
        }
    }
}

TEST_P(RandomLattice, UnitaryGroupAndAcceleration)
{
    std::mt19937 rng(GetParam() + 100);
    const double d = (GetParam() % 2 == 0) ? 1.0 : 2.0;
    const auto b = solve_bands(random_potential(rng, d), {}, support::solve_options(64, 12, 2));
    const double force = std::uniform_real_distribution<double>(0.02, 0.3)(rng);
    const DecoupledPropagator prop(b, force, 2);
    const auto s = random_state(rng, b.grid(), 2);
    const double dk = b.grid().spacing();
    std::uniform_int_distribution<long> steps(0, 200);
    const long i1 = steps(rng), i2 = steps(rng);

    const auto a = prop.evolve(s, i1 * dk);
    const auto ab = prop.evolve(a.state, i2 * dk);
    const auto direct = prop.evolve(s, (i1 + i2) * dk);
    EXPECT_NEAR(a.state.norm(), 1.0, 1e-12);
    EXPECT_NEAR(fidelity(ab.state, direct.state), 1.0, 1e-10);

    const double k0 = mean_crystal_momentum(s, 0.0);
    const double tau = i1 * dk;
    EXPECT_NEAR(mean_crystal_momentum(a.state, tau), k0 + tau, 1e-10);
}

TEST_P(RandomLattice, CentroidShiftMatchesEnergyDifference)
{
    std::mt19937 rng(GetParam() + 200);
    const auto b = solve_bands(random_potential(rng, 1.0), {}, support::solve_options(64, 12, 1));
    const auto w = wannier_state(1.0, 64);
    const double force = 0.1, tau = 17 * b.grid().spacing();
    double mean = 0.0;
    for (std::size_t j = 0; j < 64; ++j) mean += (b.energy(0, b.grid().k(j) + tau) - b.energies(0)[j]);
    mean /= 64 * force;
    EXPECT_NEAR(centroid_shift(w, b, force, tau), mean, 1e-10);
    EXPECT_NEAR(centroid_shift(w, b, force, 2 * pi), 0.0, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomLattice, ::testing::Values(1u, 2u, 3u, 4u, 5u, 6u));
