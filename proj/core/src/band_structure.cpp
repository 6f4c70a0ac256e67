#include "blochlab/band_structure.hpp"

#include "blochlab/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace blochlab {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

struct KSolution {
    RealVector values;
    MatrixXcd vectors; // columns are eigenvectors, ascending eigenvalue
};

MatrixXcd bloch_hamiltonian(const CrystalPotential& pot, const UnitSystem& units, int cutoff, double k)
{
    const int n = 2 * cutoff + 1;
    const double w = two_pi / pot.period();
    MatrixXcd h = MatrixXcd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
        const double q = k + w * (a - cutoff);
        h(a, a) = units.kinetic_coeff * q * q + pot.coefficient(0).real();
        for (int b = 0; b < n; ++b) {
            if (a != b) {
                h(a, b) = pot.coefficient(a - b);
            }
        }
    }
    return h;
}

KSolution diagonalize(const MatrixXcd& h, std::size_t keep, bool vectors)
{
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("solve_bands: Hermitian eigensolver did not converge");
    }
    KSolution out;
    out.values.resize(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        out.values[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    }
    if (vectors) {
        out.vectors = solver.eigenvectors().leftCols(static_cast<Eigen::Index>(keep));
    }
    return out;
}

// Coefficients of u(k + s*W) given those of u(k): c'_m = c_{m+s}.
VectorXcd zone_shift(const VectorXcd& c, long s)
{
    const auto n = c.size();
    VectorXcd out = VectorXcd::Zero(n);
    for (Eigen::Index m = 0; m < n; ++m) {
        const Eigen::Index src = m + s;
        if (src >= 0 && src < n) {
            out(m) = c(src);
        }
    }
    return out;
}

VectorXcd stored_vector(const BandData& data, std::size_t n, std::size_t j)
{
    const auto np = static_cast<std::size_t>(2 * data.cutoff + 1);
    const cplx* p = data.coefficients[n].data() + j * np;
    return Eigen::Map<const VectorXcd>(p, static_cast<Eigen::Index>(np));
}

// u_n at grid index `index`, which may run past either end of the zone.
VectorXcd neighbour_vector(const BandData& data, std::size_t n, long index)
{
    const auto nk = static_cast<long>(data.grid.size());
    const long wraps = static_cast<long>(std::floor(static_cast<double>(index) / static_cast<double>(nk)));
    const long base = index - wraps * nk;
    VectorXcd v = stored_vector(data, n, static_cast<std::size_t>(base));
    return wraps == 0 ? v : zone_shift(v, wraps);
}

void store_vector(BandData& data, std::size_t n, std::size_t j, const VectorXcd& v)
{
    const auto np = static_cast<std::size_t>(2 * data.cutoff + 1);
    std::copy(v.data(), v.data() + v.size(), data.coefficients[n].begin() + static_cast<std::ptrdiff_t>(j * np));
}

bool nearly_equal(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a)); }

// Rotate degenerate clusters at each k towards the previous k's vectors so band
// labels follow eigenvector continuity rather than solver order.
void resolve_degeneracies(std::vector<KSolution>& sol, double tol)
{
    for (std::size_t j = 1; j < sol.size(); ++j) {
        auto& cur = sol[j];
        const auto& prev = sol[j - 1];
        const std::size_t keep = cur.values.size();
        std::size_t a = 0;
        while (a < keep) {
            std::size_t b = a;
            while (b + 1 < keep && nearly_equal(cur.values[b + 1], cur.values[b], tol)) {
                ++b;
            }
            if (b > a) {
                const auto s = static_cast<Eigen::Index>(b - a + 1);
                const auto col = static_cast<Eigen::Index>(a);
                const MatrixXcd q = cur.vectors.middleCols(col, s);
                const MatrixXcd p = prev.vectors.middleCols(col, s);
                const MatrixXcd overlap = q.adjoint() * p;
                Eigen::JacobiSVD<MatrixXcd> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
                if (svd.singularValues().minCoeff() > 1e-6) {
                    cur.vectors.middleCols(col, s) = q * (svd.matrixU() * svd.matrixV().adjoint());
                }
            }
            a = b + 1;
        }
    }
}

void fix_gauge(BandData& data, std::size_t n)
{
    const std::size_t nk = data.grid.size();
    const double pt_floor = 1e-6;
    const double closure_floor = 0.5;

    for (std::size_t j = 0; j < nk; ++j) {
        VectorXcd v = stored_vector(data, n, j);
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        const cplx lead = v(imax);
        v *= std::conj(lead) / std::abs(lead);
        store_vector(data, n, j, v);
    }

    bool broken = false;
    for (std::size_t j = 1; j < nk; ++j) {
        const VectorXcd prev = stored_vector(data, n, j - 1);
        VectorXcd cur = stored_vector(data, n, j);
        const cplx ov = prev.dot(cur);
        if (std::abs(ov) < pt_floor) {
            broken = true;
            continue;
        }
        cur *= std::conj(ov) / std::abs(ov);
        store_vector(data, n, j, cur);
    }

    const VectorXcd last = stored_vector(data, n, nk - 1);
    const VectorXcd closing = zone_shift(stored_vector(data, n, 0), 1);
    const cplx loop = last.dot(closing);
    if (broken || std::abs(loop) < closure_floor) {
        return;
    }
    const double gamma = std::arg(loop);
    for (std::size_t j = 1; j < nk; ++j) {
        VectorXcd v = stored_vector(data, n, j);
        v *= std::polar(1.0, gamma * static_cast<double>(j) / static_cast<double>(nk));
        store_vector(data, n, j, v);
    }
}

} // namespace

// ---------------------------------------------------------------------------
// BandStructure

BandStructure::BandStructure(BandData data)
{
    if (data.energies.empty()) {
        throw InvalidArgument("BandStructure: no bands");
    }
    const std::size_t nk = data.grid.size();
    for (const auto& e : data.energies) {
        if (e.size() != nk) {
            throw InvalidArgument("BandStructure: energy samples do not match the grid");
        }
    }
    if (!data.berry.empty()) {
        if (data.berry.size() != data.energies.size()) {
            throw InvalidArgument("BandStructure: Berry connection band count mismatch");
        }
        for (const auto& x : data.berry) {
            if (x.size() != nk) {
                throw InvalidArgument("BandStructure: Berry samples do not match the grid");
            }
        }
        if (data.berry_unreliable.empty()) {
            data.berry_unreliable.assign(data.energies.size(), std::vector<std::uint8_t>(nk, 0));
        }
    }
    if (!data.coefficients.empty()) {
        if (data.cutoff < 0 || data.coefficients.size() != data.energies.size()) {
            throw InvalidArgument("BandStructure: coefficient band count mismatch");
        }
        const auto np = static_cast<std::size_t>(2 * data.cutoff + 1);
        for (const auto& c : data.coefficients) {
            if (c.size() != nk * np) {
                throw InvalidArgument("BandStructure: coefficient storage does not match grid and cutoff");
            }
        }
    }
    if (data.near_crossing.empty()) {
        data.near_crossing.assign(data.energies.size(), std::vector<std::uint8_t>(nk, 0));
    }
    energy_series_.reserve(data.energies.size());
    for (const auto& e : data.energies) {
        energy_series_.emplace_back(std::span<const double>(e), data.grid.start(), data.grid.width());
    }
    data_ = std::make_shared<const BandData>(std::move(data));
}

std::span<const double> BandStructure::energies(std::size_t n) const { return data_->energies.at(n); }

std::span<const double> BandStructure::berry(std::size_t n) const
{
    if (!has_berry()) {
        throw InvalidArgument("BandStructure: Berry connection not computed");
    }
    return data_->berry.at(n);
}

std::span<const cplx> BandStructure::coefficients(std::size_t n, std::size_t j) const
{
    if (!has_basis()) {
        throw MissingBasisError("BandStructure: analytic band has no plane-wave basis");
    }
    const std::size_t np = plane_waves();
    return std::span<const cplx>(data_->coefficients.at(n)).subspan(j * np, np);
}

bool BandStructure::berry_reliable(std::size_t n, std::size_t j) const
{
    return !has_berry() || data_->berry_unreliable.at(n).at(j) == 0;
}

double BandStructure::energy(std::size_t n, double k, int p) const { return energy_series_.at(n)(k, p).real(); }

RealVector BandStructure::energies_shifted(std::size_t n, double shift, int p) const
{
    const auto z = energy_series_.at(n).shifted(shift, p);
    RealVector out(z.size());
    std::transform(z.begin(), z.end(), out.begin(), [](cplx v) { return v.real(); });
    return out;
}

double BandStructure::band_width(std::size_t n) const
{
    const auto e = energies(n);
    const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
    return *hi - *lo;
}

double BandStructure::band_gap(std::size_t n) const
{
    if (n + 1 >= num_bands()) {
        throw InvalidArgument("BandStructure::band_gap: band above is not stored");
    }
    const auto lower = energies(n);
    const auto upper = energies(n + 1);
    return *std::min_element(upper.begin(), upper.end()) - *std::max_element(lower.begin(), lower.end());
}

// ---------------------------------------------------------------------------
// Solvers

BandStructure solve_bands(const CrystalPotential& pot, const UnitSystem& units, const SolveOptions& options)
{
    units.validate();
    if (options.cutoff < 2) {
        throw InvalidArgument("solve_bands: plane-wave cutoff must be at least 2");
    }
    if (options.num_bands == 0 || options.num_bands > static_cast<std::size_t>(2 * options.cutoff - 2)) {
        throw InvalidArgument("solve_bands: need 1 <= num_bands <= 2*cutoff - 2");
    }
    if (pot.max_harmonic() > 2 * options.cutoff) {
        throw InvalidArgument("solve_bands: potential harmonics exceed the plane-wave basis");
    }
    const ZoneGrid grid(pot.period(), options.num_k);
    const std::size_t nk = grid.size();
    const std::size_t nb = options.num_bands;
    // One extra band feeds the degeneracy and crossing checks for the top kept band.
    const std::size_t keep = nb + 1;

    std::vector<KSolution> sol(nk);
#pragma omp parallel for schedule(static)
    for (long j = 0; j < static_cast<long>(nk); ++j) {
        const auto h = bloch_hamiltonian(pot, units, options.cutoff, grid.k(static_cast<std::size_t>(j)));
        sol[static_cast<std::size_t>(j)] = diagonalize(h, keep, true);
    }
    resolve_degeneracies(sol, options.degeneracy_tolerance);

    BandData data;
    data.grid = grid;
    data.units = units;
    data.cutoff = options.cutoff;
    const auto np = static_cast<std::size_t>(2 * options.cutoff + 1);
    data.energies.assign(nb, RealVector(nk));
    data.coefficients.assign(nb, ComplexVector(nk * np));
    data.near_crossing.assign(nb, std::vector<std::uint8_t>(nk, 0));
    const double crossing_tol = 1e-6;
    for (std::size_t n = 0; n < nb; ++n) {
        for (std::size_t j = 0; j < nk; ++j) {
            data.energies[n][j] = sol[j].values[n];
            store_vector(data, n, j, sol[j].vectors.col(static_cast<Eigen::Index>(n)));
            const double e = sol[j].values[n];
            const bool below = n > 0 && nearly_equal(e, sol[j].values[n - 1], crossing_tol);
            const bool above = nearly_equal(sol[j].values[n + 1], e, crossing_tol);
            data.near_crossing[n][j] = (below || above) ? 1 : 0;
        }
        fix_gauge(data, n);
    }

    if (options.check_cutoff) {
        double shift = 0.0;
#pragma omp parallel for schedule(static) reduction(max : shift)
        for (long j = 0; j < static_cast<long>(nk); ++j) {
            const auto h = bloch_hamiltonian(pot, units, 2 * options.cutoff, grid.k(static_cast<std::size_t>(j)));
            const auto fine = diagonalize(h, nb, false);
            for (std::size_t n = 0; n < nb; ++n) {
                shift = std::max(shift, std::abs(fine.values[n] - sol[static_cast<std::size_t>(j)].values[n]));
            }
        }
        data.diagnostics.max_cutoff_shift = shift;
        if (shift > options.cutoff_tolerance) {
            std::ostringstream msg;
            msg << "cutoff sensitivity: doubling the plane-wave cutoff from " << options.cutoff << " moves kept bands by "
                << shift << " (tolerance " << options.cutoff_tolerance << ")";
            if (options.strict_cutoff) {
                throw CutoffError(msg.str());
            }
            data.diagnostics.warnings.push_back(msg.str());
        }
    }

    BandStructure bands(std::move(data));
    return options.compute_berry ? berry_connection_diag(bands) : bands;
}

BandStructure analytic_cosine_band(double bandwidth, double period, std::size_t num_k)
{
    if (!(bandwidth > 0.0)) {
        throw InvalidArgument("analytic_cosine_band: bandwidth must be positive");
    }
    BandData data;
    data.grid = ZoneGrid(period, num_k);
    data.energies.assign(1, RealVector(num_k));
    for (std::size_t j = 0; j < num_k; ++j) {
        data.energies[0][j] = 0.5 * bandwidth * (1.0 - std::cos(data.grid.k(j) * period));
    }
    data.berry.assign(1, RealVector(num_k, 0.0));
    return BandStructure(std::move(data));
}

BandStructure berry_connection_diag(const BandStructure& bands, const BerryOptions& options)
{
    if (!bands.has_basis()) {
        throw MissingBasisError("berry_connection_diag: band structure has no Bloch basis");
    }
    BandData data = bands.data();
    const std::size_t nk = data.grid.size();
    const std::size_t nb = data.energies.size();
    const double h = data.grid.spacing();
    const auto lnk = static_cast<long>(nk);
    const std::array<long, 4> offsets{-2, -1, 1, 2};
    const std::array<double, 4> weights{1.0, -8.0, 8.0, -1.0};
    auto flagged_near = [&](std::size_t n, long j, long reach) {
        for (long s = -reach; s <= reach; ++s) {
            if (data.near_crossing[n][static_cast<std::size_t>(((j + s) % lnk + lnk) % lnk)] != 0) {
                return true;
            }
        }
        return false;
    };

    data.berry.assign(nb, RealVector(nk));
    data.berry_unreliable.assign(nb, std::vector<std::uint8_t>(nk, 0));
    data.diagnostics.warnings.erase(std::remove_if(data.diagnostics.warnings.begin(), data.diagnostics.warnings.end(),
                                                   [](const std::string& w) { return w.rfind("berry", 0) == 0; }),
                                    data.diagnostics.warnings.end());
    double max_residue = 0.0;
    for (std::size_t n = 0; n < nb; ++n) {
        // Link phases arg<u_j|u_{j+1}> split into their zone average, which is the
        // constant connection of the twisted parallel-transport gauge, and a
        // periodic remainder alpha whose spectral derivative is the gauge part.
        RealVector link(nk);
        for (std::size_t j = 0; j < nk; ++j) {
            const auto jl = static_cast<long>(j);
            const cplx ov = stored_vector(data, n, j).dot(neighbour_vector(data, n, jl + 1));
            const bool flagged = flagged_near(n, jl, 2) || flagged_near(n, jl + 1, 2);
            if (!flagged && std::abs(ov) < options.overlap_threshold) {
                std::ostringstream msg;
                msg << "berry_connection_diag: neighbour overlap " << std::abs(ov) << " at band " << n << ", k index " << j
                    << " (band crossing or insufficient k grid)";
                throw GaugeError(msg.str());
            }
            link[j] = std::arg(ov);
        }
        const double total = std::accumulate(link.begin(), link.end(), 0.0);
        const double per_link = total / static_cast<double>(nk);
        RealVector alpha(nk, 0.0);
        for (std::size_t j = 1; j < nk; ++j) {
            alpha[j] = alpha[j - 1] + link[j - 1] - per_link;
        }
        const RealVector dalpha = spectral::derivative(std::span<const double>(alpha), data.grid.width());
        for (std::size_t j = 0; j < nk; ++j) {
            data.berry[n][j] = -per_link / h - dalpha[j];
        }

        // Independent fourth-order difference of <u|d_k u>; its real part must vanish.
        for (std::size_t j = 0; j < nk; ++j) {
            const auto jl = static_cast<long>(j);
            if (flagged_near(n, jl, 2)) {
                data.berry_unreliable[n][j] = 1;
                continue;
            }
            const VectorXcd u = stored_vector(data, n, j);
            cplx inner{};
            for (std::size_t t = 0; t < offsets.size(); ++t) {
                inner += weights[t] * u.dot(neighbour_vector(data, n, jl + offsets[t]));
            }
            max_residue = std::max(max_residue, std::abs(inner.real()) / (12.0 * h));
        }
    }
    data.diagnostics.max_berry_residue = max_residue;
    if (max_residue > options.residue_tolerance) {
        std::ostringstream msg;
        msg << "berry: finite-difference residue |Im X| reaches " << max_residue
            << "; some band varies faster than the k grid resolves";
        data.diagnostics.warnings.push_back(msg.str());
    }
    return BandStructure(std::move(data));
}

BandStructure regauge(const BandStructure& bands, std::size_t n, std::span<const double> phase, const BerryOptions& options)
{
    if (!bands.has_basis()) {
        throw MissingBasisError("regauge: band structure has no Bloch basis");
    }
    if (phase.size() != bands.grid().size() || n >= bands.num_bands()) {
        throw InvalidArgument("regauge: phase samples or band index out of range");
    }
    BandData data = bands.data();
    for (std::size_t j = 0; j < phase.size(); ++j) {
        VectorXcd v = stored_vector(data, n, j);
        v *= std::polar(1.0, phase[j]);
        store_vector(data, n, j, v);
    }
    return berry_connection_diag(BandStructure(std::move(data)), options);
}

double berry_phase(const BandStructure& bands, std::size_t n)
{
    const auto x = bands.berry(n);
    return std::accumulate(x.begin(), x.end(), 0.0) * bands.grid().spacing();
}

double wilson_loop_phase(const BandStructure& bands, std::size_t n)
{
    if (!bands.has_basis()) {
        throw MissingBasisError("wilson_loop_phase: band structure has no Bloch basis");
    }
    const auto& data = bands.data();
    const std::size_t nk = bands.grid().size();
    cplx product{1.0, 0.0};
    for (std::size_t j = 0; j < nk; ++j) {
        const VectorXcd u = stored_vector(data, n, j);
        const VectorXcd v = neighbour_vector(data, n, static_cast<long>(j) + 1);
        const cplx ov = u.dot(v);
        product *= ov / std::abs(ov);
    }
    return -std::arg(product);
}

cplx eval_periodic_part(const BandStructure& bands, std::size_t n, std::size_t j, double x)
{
    const auto c = bands.coefficients(n, j);
    const int cutoff = bands.cutoff();
    const double w = two_pi / bands.period();
    cplx sum{};
    for (int m = -cutoff; m <= cutoff; ++m) {
        sum += c[static_cast<std::size_t>(m + cutoff)] * std::polar(1.0, w * m * x);
    }
    return sum / std::sqrt(bands.period());
}

cplx eval_bloch(const BandStructure& bands, std::size_t n, std::size_t j, double x)
{
    const double k = bands.grid().k(j);
    const cplx u = eval_periodic_part(bands, n, j, x);
    return std::polar(1.0, k * x) * u * std::sqrt(bands.period() / two_pi);
}

cplx eval_bloch(const BandStructure& bands, std::size_t n, double k, double x)
{
    const auto& grid = bands.grid();
    const double offset = (grid.wrap(k) - grid.start()) / grid.spacing();
    const double r = std::round(offset);
    if (std::abs(offset - r) > 1e-9) {
        throw InvalidArgument("eval_bloch: k is not a grid point");
    }
    const auto j = static_cast<std::size_t>(r) % grid.size();
    return eval_bloch(bands, n, j, x);
}

// ---------------------------------------------------------------------------
// Phase table

PhaseTable::PhaseTable(std::size_t band, double force, const ZoneGrid& grid, std::span<const double> integrand)
    : band_(band), force_(force), grid_(grid), series_(integrand, grid.start(), grid.width())
{
    if (integrand.size() != grid.size()) {
        throw InvalidArgument("PhaseTable: integrand does not match the grid");
    }
    mean_ = series_.mean().real();
    const auto p = series_.shifted(0.0, -1);
    periodic_.resize(p.size());
    std::transform(p.begin(), p.end(), periodic_.begin(), [](cplx z) { return z.real(); });
}

double PhaseTable::antiderivative(double k) const { return mean_ * k + series_(k, -1).real(); }

RealVector PhaseTable::periodic_part_shifted(double shift) const
{
    const auto p = series_.shifted(shift, -1);
    RealVector out(p.size());
    std::transform(p.begin(), p.end(), out.begin(), [](cplx z) { return z.real(); });
    return out;
}

PhaseTable band_antiderivative(const BandStructure& bands, double force, std::size_t n)
{
    if (n >= bands.num_bands()) {
        throw InvalidArgument("band_antiderivative: band index out of range");
    }
    if (!bands.has_berry()) {
        throw InvalidArgument("band_antiderivative: Berry connection not computed");
    }
    const auto e = bands.energies(n);
    const auto x = bands.berry(n);
    RealVector g(e.size());
    for (std::size_t j = 0; j < e.size(); ++j) {
        g[j] = e[j] - force * x[j];
    }
    return PhaseTable(n, force, bands.grid(), g);
}

} // namespace blochlab
