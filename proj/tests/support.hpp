#pragma once

// Reference computations that share no code with the library, plus cached fixtures.

#include <blochlab/band_structure.hpp>
#include <blochlab/potential.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace support {

inline constexpr double pi = std::numbers::pi;

/// erf by its Maclaurin series for |x| < 3 and by the Lentz continued fraction for erfc above.
inline double erf_reference(double x)
{
    if (x < 0) return -erf_reference(-x);
    if (x < 3.0) {
        long double sum = 0.0L, term = x;
        for (int n = 0; n < 200; ++n) {
            sum += term / (2 * n + 1);
            term *= -static_cast<long double>(x) * x / (n + 1);
            if (std::fabs(static_cast<double>(term)) < 1e-30) break;
        }
        return static_cast<double>(2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum);
    }
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + 1/2/(x + 1/(x + 3/2/(x + ...))))
    double f = x, c = x, d = 0.0;
    for (int n = 1; n < 500; ++n) {
        const double a = n / 2.0;
        d = x + a * d;
        c = x + a / c;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(-x * x) / std::sqrt(pi) / f;
}

/// Adaptive Simpson quadrature.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13)
{
    const std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int depth) {
            const double mid = 0.5 * (lo + hi);
            const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
            const double flm = f(lm), frm = f(rm);
            const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
            if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
                return left + right + (left + right - whole) / 15.0;
            }
            return rec(lo, mid, flo, flm, fmid, left, depth - 1) + rec(mid, hi, fmid, frm, fhi, right, depth - 1);
        };
    // Split first so periodic integrands are not sampled only at coincident nodes.
    const int pieces = 16;
    double total = 0.0;
    for (int i = 0; i < pieces; ++i) {
        const double lo = a + (b - a) * i / pieces, hi = a + (b - a) * (i + 1) / pieces;
        const double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
        total += rec(lo, hi, flo, fmid, fhi, (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi), 40);
    }
    return total;
}

/// Eigenvalues of -c d^2/dx^2 + 2q cos(2 pi x) with period 1 at k = 0 (periodic) or
/// k = pi (antiperiodic), from the real cosine/sine tridiagonal blocks.
inline std::vector<double> mathieu_edges(double q, double c, bool antiperiodic, int size = 200)
{
    std::vector<double> all;
    for (int parity = 0; parity < 2; ++parity) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(size, size);
        for (int m = 0; m < size; ++m) {
            double wave;
            if (antiperiodic) {
                wave = (2 * m + 1) * pi;
            } else {
                wave = 2 * pi * (parity == 0 ? m : m + 1);
            }
            h(m, m) = c * wave * wave;
            if (m + 1 < size) h(m, m + 1) = h(m + 1, m) = q;
        }
        if (antiperiodic) {
            h(0, 0) += parity == 0 ? q : -q;
        } else if (parity == 0) {
            h(0, 1) = h(1, 0) = std::sqrt(2.0) * q;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
        for (int i = 0; i < size; ++i) all.push_back(es.eigenvalues()(i));
    }
    std::sort(all.begin(), all.end());
    return all;
}

inline blochlab::SolveOptions solve_options(std::size_t num_k, int cutoff, std::size_t num_bands)
{
    blochlab::SolveOptions o;
    o.num_k = num_k;
    o.cutoff = cutoff;
    o.num_bands = num_bands;
    return o;
}

/// V = -40 cos(2 pi x), d = 1: first band width 1.1858, gap 37.6.
inline const blochlab::BandStructure& deep_bands()
{
    static const blochlab::BandStructure b =
        blochlab::solve_bands(blochlab::CrystalPotential::cosine(-40.0, 1.0), {}, solve_options(256, 32, 4));
    return b;
}

/// V = -10 cos(2 pi x), d = 1, coarse grid for quick reconstruction tests.
inline const blochlab::BandStructure& moderate_bands()
{
    static const blochlab::BandStructure b =
        blochlab::solve_bands(blochlab::CrystalPotential::cosine(-10.0, 1.0), {}, solve_options(64, 16, 2));
    return b;
}

} // namespace support
