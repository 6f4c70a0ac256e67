#pragma once

#include "blochlab/grid.hpp"
#include "blochlab/potential.hpp"
#include "blochlab/spectral.hpp"
#include "blochlab/units.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace blochlab {

struct BandDiagnostics {
    /// Largest |E_n(k; 2M) - E_n(k; M)| over kept bands, negative when not checked.
    double max_cutoff_shift = -1.0;
    /// Largest |Im X_nn| discarded after the finite-difference Berry evaluation.
    double max_berry_residue = 0.0;
    std::vector<std::string> warnings;
};

/// Raw storage behind a BandStructure. Band index n is zero based (n = 0 is the
/// lowest band). Plane-wave coefficients of u_n(k_j, .) are stored row-major as
/// coefficients[n][j * (2M+1) + (m + M)] and have unit Euclidean norm.
struct BandData {
    ZoneGrid grid;
    UnitSystem units;
    int cutoff = 0;
    std::vector<RealVector> energies;
    std::vector<RealVector> berry;
    std::vector<std::vector<std::uint8_t>> berry_unreliable;
    std::vector<ComplexVector> coefficients;
    std::vector<std::vector<std::uint8_t>> near_crossing;
    BandDiagnostics diagnostics;
};

/// Immutable band functions, Bloch functions and diagonal Berry connection on a
/// uniform zone grid. Cheap to copy; safe to share between threads.
class BandStructure {
  public:
    explicit BandStructure(BandData data);

    const ZoneGrid& grid() const { return data_->grid; }
    double period() const { return data_->grid.period(); }
    const UnitSystem& units() const { return data_->units; }
    std::size_t num_bands() const { return data_->energies.size(); }
    int cutoff() const { return data_->cutoff; }
    std::size_t plane_waves() const { return static_cast<std::size_t>(2 * data_->cutoff + 1); }
    bool has_basis() const { return !data_->coefficients.empty(); }
    bool has_berry() const { return !data_->berry.empty(); }
    const BandData& data() const { return *data_; }
    const BandDiagnostics& diagnostics() const { return data_->diagnostics; }

    std::span<const double> energies(std::size_t n) const;
    std::span<const double> berry(std::size_t n) const;
    /// Plane-wave coefficients of u_n at grid point j.
    std::span<const cplx> coefficients(std::size_t n, std::size_t j) const;
    bool berry_reliable(std::size_t n, std::size_t j) const;

    /// p-th k-derivative of the band-limited interpolant of E_n at arbitrary k.
    double energy(std::size_t n, double k, int p = 0) const;
    /// p-th derivative of E_n sampled at k_j + shift for all grid points j.
    RealVector energies_shifted(std::size_t n, double shift, int p = 0) const;

    /// max_k E_n - min_k E_n over the grid.
    double band_width(std::size_t n) const;
    /// min_k E_{n+1} - max_k E_n over the grid (negative when the bands overlap).
    double band_gap(std::size_t n) const;

  private:
    std::shared_ptr<const BandData> data_;
    std::vector<spectral::TrigSeries> energy_series_;
};

struct SolveOptions {
    std::size_t num_k = 256;
    int cutoff = 32;
    std::size_t num_bands = 4;
    /// Re-solve at twice the cutoff and record how far the kept bands move.
    bool check_cutoff = false;
    double cutoff_tolerance = 1e-8;
    /// Throw CutoffError instead of recording a warning.
    bool strict_cutoff = false;
    /// Relative eigenvalue spacing below which two bands count as degenerate.
    double degeneracy_tolerance = 1e-9;
    /// Fill the Berry connection after gauge fixing.
    bool compute_berry = true;
};

/// Plane-wave diagonalization of H(k) at every grid point, followed by gauge fixing.
///
/// The gauge of each band is smooth and periodic across the zone boundary:
/// every u_n(k_j) is first phased so its largest coefficient is real positive,
/// then parallel transported from k_0, and the residual Wilson-loop phase is
/// spread uniformly over the zone.
BandStructure solve_bands(const CrystalPotential& pot, const UnitSystem& units, const SolveOptions& options = {});

/// Single band E(k) = (Delta/2)(1 - cos(k d)) with X = 0 and no Bloch basis.
BandStructure analytic_cosine_band(double bandwidth, double period, std::size_t num_k);

struct BerryOptions {
    /// Minimum |<u(k_j)|u(k_j+s)>| for stencil neighbours at unflagged points.
    double overlap_threshold = 0.5;
    /// |Im X| of the finite-difference cross-check above which a warning is recorded.
    double residue_tolerance = 1e-6;
};

/// X_nn(k) = i <u_n(k)|d_k u_n(k)> in the stored gauge.
///
/// The neighbour link phases arg<u_j|u_{j+1}> give the zone-average connection
/// (minus the Wilson-loop phase over the zone width) and a periodic gauge phase
/// whose spectral derivative supplies the k dependence. A fourth-order centred
/// difference of <u|d_k u> is evaluated alongside; its real part, which must
/// vanish, is reported as max_berry_residue. Points within two grid steps of a
/// near-degenerate k are marked unreliable and never raise; elsewhere a small
/// neighbour overlap raises GaugeError.
BandStructure berry_connection_diag(const BandStructure& bands, const BerryOptions& options = {});

/// Multiply u_n(k_j) by exp(i phase[j]) and recompute the Berry connection.
/// The phase must be the sampling of a smooth periodic function.
BandStructure regauge(const BandStructure& bands, std::size_t n, std::span<const double> phase,
                      const BerryOptions& options = {});

/// Zone integral of X_nn by the rectangle rule.
double berry_phase(const BandStructure& bands, std::size_t n);

/// -arg of the closed product of neighbour overlaps around the zone (Wilson loop).
double wilson_loop_phase(const BandStructure& bands, std::size_t n);

/// Delta-normalized Bloch function phi_n(k_j, x) = e^{i k_j x} sum_m c_m e^{2 pi i m x/d} / sqrt(2 pi).
cplx eval_bloch(const BandStructure& bands, std::size_t n, std::size_t j, double x);

/// Same as above for a k that must lie on the grid (after wrapping).
cplx eval_bloch(const BandStructure& bands, std::size_t n, double k, double x);

/// Cell-normalized periodic part u_n(k_j, x) = sum_m c_m e^{2 pi i m x/d} / sqrt(d).
cplx eval_periodic_part(const BandStructure& bands, std::size_t n, std::size_t j, double x);

/// Antiderivative of E_n(q) - F X_nn(q): A(k) = mean * k + P(k), P periodic with zero mean.
class PhaseTable {
  public:
    PhaseTable(std::size_t band, double force, const ZoneGrid& grid, std::span<const double> integrand);

    std::size_t band() const { return band_; }
    double force() const { return force_; }
    const ZoneGrid& grid() const { return grid_; }
    /// Zone average of E_n - F X_nn.
    double zone_average() const { return mean_; }

    /// A(k) at arbitrary k.
    double antiderivative(double k) const;
    /// A(k_j) from stored samples.
    double antiderivative_at(std::size_t j) const { return mean_ * grid_.k(j) + periodic_[j]; }
    /// Periodic part P at grid point j.
    double periodic_part(std::size_t j) const { return periodic_[j]; }
    /// P(k_j + shift) for all j.
    RealVector periodic_part_shifted(double shift) const;

  private:
    std::size_t band_;
    double force_;
    ZoneGrid grid_;
    double mean_ = 0.0;
    spectral::TrigSeries series_;
    RealVector periodic_;
};

/// Spectral antiderivative of E_n - F X_nn on the zone grid.
PhaseTable band_antiderivative(const BandStructure& bands, double force, std::size_t n);

} // namespace blochlab
