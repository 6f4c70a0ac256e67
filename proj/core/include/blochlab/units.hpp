#pragma once

namespace blochlab {

/// Physical scales of the Hamiltonian -kinetic_coeff d^2/dx^2 + V(x) - F x.
///
/// kinetic_coeff is hbar^2/(2m). The defaults (1, 1) make the rescaled time
/// tau = F t / hbar dimensionless with Bloch period 2*pi/d.
struct UnitSystem {
    double hbar = 1.0;
    double kinetic_coeff = 1.0;

    void validate() const;
};

/// Static field parameters. F is the force e*E; t_bloch * F * d == 2*pi*hbar.
struct FieldParams {
    double force = 0.0;
    double tau_bloch = 0.0;
    double t_bloch = 0.0;

    static FieldParams make(double force, double period, const UnitSystem& units = {});
};

} // namespace blochlab
