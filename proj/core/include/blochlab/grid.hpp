#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace blochlab {

using cplx = std::complex<double>;
using ComplexVector = std::vector<cplx>;
using RealVector = std::vector<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Uniform grid over the canonical Brillouin zone [-pi/d, pi/d).
///
/// Point j sits at k_j = -pi/d + j * dk with dk = 2*pi/(d*N). The grid is
/// periodic: k_N is identified with k_0 shifted by one reciprocal vector.
class ZoneGrid {
  public:
    ZoneGrid() = default;
    ZoneGrid(double period, std::size_t points);

    double period() const { return period_; }
    std::size_t size() const { return points_; }
    double width() const { return two_pi / period_; }
    double spacing() const { return width() / static_cast<double>(points_); }
    double start() const { return -std::numbers::pi / period_; }
    double k(std::size_t j) const { return start() + static_cast<double>(j) * spacing(); }
    RealVector points() const;

    /// Representative of k in [-pi/d, pi/d).
    double wrap(double k) const;

    /// Index offset s with tau = s*dk, if tau is commensurate within `rel_tol`.
    bool commensurate(double tau, long& shift, double rel_tol = 1e-9) const;

    bool operator==(const ZoneGrid& other) const;

  private:
    double period_ = 1.0;
    std::size_t points_ = 0;
};

/// Uniform real-space grid x_l = x_min + l*dx, l = 0..n-1.
class XGrid {
  public:
    XGrid() = default;
    XGrid(double x_min, double spacing, std::size_t points);

    /// n points covering [x_min, x_max) with spacing (x_max - x_min)/n.
    static XGrid periodic_box(double x_min, double x_max, std::size_t points);
    /// Points spaced by `spacing` covering at least [x_min, x_max], symmetric about their midpoint.
    static XGrid covering(double x_min, double x_max, double spacing);

    double x_min() const { return x_min_; }
    double x_max() const { return x(points_ - 1); }
    double spacing() const { return spacing_; }
    std::size_t size() const { return points_; }
    double x(std::size_t l) const { return x_min_ + static_cast<double>(l) * spacing_; }
    RealVector points() const;

    bool operator==(const XGrid& other) const;

  private:
    double x_min_ = 0.0;
    double spacing_ = 1.0;
    std::size_t points_ = 0;
};

} // namespace blochlab
