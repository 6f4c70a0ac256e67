#include "blochlab/grid.hpp"

#include "blochlab/error.hpp"
#include "blochlab/units.hpp"

#include <cmath>

namespace blochlab {

ZoneGrid::ZoneGrid(double period, std::size_t points) : period_(period), points_(points)
{
    if (!(period > 0.0)) {
        throw InvalidArgument("ZoneGrid: period must be positive");
    }
    if (points < 2 || points % 2 != 0) {
        throw InvalidArgument("ZoneGrid: number of k points must be even and >= 2");
    }
}

RealVector ZoneGrid::points() const
{
    RealVector ks(points_);
    for (std::size_t j = 0; j < points_; ++j) {
        ks[j] = k(j);
    }
    return ks;
}

double ZoneGrid::wrap(double k) const
{
    const double w = width();
    return k - w * std::floor((k - start()) / w);
}

bool ZoneGrid::commensurate(double tau, long& shift, double rel_tol) const
{
    const double s = tau / spacing();
    const double r = std::round(s);
    if (std::abs(s - r) > rel_tol * std::max(1.0, std::abs(s))) {
        return false;
    }
    shift = static_cast<long>(r);
    return true;
}

bool ZoneGrid::operator==(const ZoneGrid& other) const
{
    return period_ == other.period_ && points_ == other.points_;
}

XGrid::XGrid(double x_min, double spacing, std::size_t points) : x_min_(x_min), spacing_(spacing), points_(points)
{
    if (!(spacing > 0.0) || points == 0) {
        throw InvalidArgument("XGrid: spacing and point count must be positive");
    }
}

XGrid XGrid::periodic_box(double x_min, double x_max, std::size_t points)
{
    if (!(x_max > x_min) || points == 0) {
        throw InvalidArgument("XGrid: empty box");
    }
    return XGrid(x_min, (x_max - x_min) / static_cast<double>(points), points);
}

XGrid XGrid::covering(double x_min, double x_max, double spacing)
{
    if (!(x_max > x_min) || !(spacing > 0.0)) {
        throw InvalidArgument("XGrid: empty interval or non-positive spacing");
    }
    const auto intervals = static_cast<std::size_t>(std::ceil((x_max - x_min) / spacing - 1e-9));
    const double mid = 0.5 * (x_min + x_max);
    const double half = 0.5 * static_cast<double>(intervals) * spacing;
    return XGrid(mid - half, spacing, intervals + 1);
}

RealVector XGrid::points() const
{
    RealVector xs(points_);
    for (std::size_t l = 0; l < points_; ++l) {
        xs[l] = x(l);
    }
    return xs;
}

bool XGrid::operator==(const XGrid& other) const
{
    return x_min_ == other.x_min_ && spacing_ == other.spacing_ && points_ == other.points_;
}

void UnitSystem::validate() const
{
    if (!(hbar > 0.0) || !(kinetic_coeff > 0.0)) {
        throw InvalidArgument("UnitSystem: hbar and kinetic_coeff must be strictly positive");
    }
}

FieldParams FieldParams::make(double force, double period, const UnitSystem& units)
{
    units.validate();
    if (!(force > 0.0)) {
        throw InvalidArgument("FieldParams: force must be positive");
    }
    if (!(period > 0.0)) {
        throw InvalidArgument("FieldParams: period must be positive");
    }
    return FieldParams{force, two_pi / period, two_pi * units.hbar / (force * period)};
}

} // namespace blochlab
