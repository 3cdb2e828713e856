#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "umf/fiber.hpp"
#include "umf/field.hpp"

namespace umf {

/// Uniform grid of wave numbers k_j = k_min + j dk, j = 0..n_k-1.
class KGrid {
public:
    KGrid() = default;
    KGrid(double k_min, double k_max, std::size_t n_k);

    double k_min() const { return k_min_; }
    double k_max() const { return k_max_; }
    std::size_t size() const { return n_k_; }
    double spacing() const { return dk_; }
    double k(std::size_t j) const { return j + 1 == n_k_ ? k_max_ : k_min_ + static_cast<double>(j) * dk_; }

private:
    double k_min_ = 0.0;
    double k_max_ = 1.0;
    std::size_t n_k_ = 2;
    double dk_ = 1.0;
};

/// Default k-window: the range of a over the box widened by the turning-point
/// margin sqrt(2 target), minus the wave numbers whose wells sit within
/// sqrt(2 factor target) of a wall value. The largest remaining interval is
/// returned.
KGrid default_kgrid(const VectorPotential& a, std::size_t n_k, double target_energy, double box_factor = 4.0);

/// Crude upper estimate of eps_{n_max} used to size default windows.
double default_target_energy(const FieldRealization& field, int n_max);

struct SweepOptions {
    std::size_t threads = 0;  ///< 0 = machine parallelism
    SolveOptions solve;
};

/// All fibers of one field on one k-grid, in k order.
struct FiberSweep {
    VectorPotential potential;
    KGrid kgrid;
    std::vector<EigenSolution> fibers;
    std::vector<std::vector<double>> velocities;  ///< [j][n]

    std::size_t bands() const { return fibers.empty() ? 0 : fibers.front().bands(); }
};

FiberSweep sweep_fibers(const VectorPotential& a, const KGrid& kgrid, int n_max, const SweepOptions& options = {});

struct BandFunction {
    int n = 0;
    KGrid kgrid;
    std::vector<double> energies;
    std::vector<double> velocities;
};

std::vector<BandFunction> band_functions(const FiberSweep& sweep);

/// assemble_fiber + solve_fiber + fh_velocity for every k_j; errors carry k_j.
std::vector<BandFunction> sweep(const FieldRealization& field, const KGrid& kgrid, int n_max,
                                const SweepOptions& options = {});

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct BandInterval {
    int n = 0;
    double inf = 0.0;
    double sup = 0.0;
    double bandwidth = 0.0;
    bool flat = false;
};

/// Band intervals over the sampled k-window. These are inner approximations
/// of the true bands: the supremum over all real k is not attainable.
struct BandStructure {
    std::vector<BandInterval> bands;
    KGrid kgrid;
    int n_max = 0;
    double tol_flat = 1e-6;
    std::string spec_id;
    std::optional<std::uint64_t> seed;
    Grid1D grid;
};

BandStructure assemble_bands(std::span<const BandFunction> funcs, double tol_flat = 1e-6);

struct SpectrumClassification {
    std::vector<Interval> ac;  ///< merged union of non-flat bands
    std::vector<double> pp;    ///< energies of flat bands
};

SpectrumClassification spectrum_sets(const BandStructure& bs);

/// Per band, [min_j d eps_n/dk, max_j d eps_n/dk].
std::vector<Interval> velocity_bands(std::span<const BandFunction> funcs);

/// max over (n, k) of |eps_n^k(theta_z b) - eps_n^{k + a(z)}(b)|. The shifted
/// field lives on the shrunk window; the unshifted one is solved on the
/// translate of that window, so both sides see identical boxes.
double verify_shift_covariance(const FieldRealization& field, double z, const KGrid& kgrid, int n_max,
                               const SweepOptions& options = {});

}  // namespace umf
