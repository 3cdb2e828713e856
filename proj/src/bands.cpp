#include "umf/bands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "umf/error.hpp"
#include "umf/parallel.hpp"

namespace umf {

KGrid::KGrid(double k_min, double k_max, std::size_t n_k) : k_min_(k_min), k_max_(k_max), n_k_(n_k) {
    if (!(std::isfinite(k_min) && std::isfinite(k_max)) || !(k_min < k_max)) {
        std::ostringstream msg;
        msg << "kgrid: need finite k_min < k_max, got [" << k_min << ", " << k_max << "]";
        throw ValidationError(msg.str());
    }
    if (n_k < 2) throw ValidationError("kgrid: need n_k >= 2");
    dk_ = (k_max - k_min) / static_cast<double>(n_k - 1);
}

double default_target_energy(const FieldRealization& field, int n_max) {
    double bmax = 0.0;
    for (double b : field.values) bmax = std::max(bmax, std::abs(b));
    return (static_cast<double>(n_max) + 1.0) * std::max(bmax, 1e-3);
}

KGrid default_kgrid(const VectorPotential& a, std::size_t n_k, double target_energy, double box_factor) {
    const auto [amin_it, amax_it] = std::minmax_element(a.values.begin(), a.values.end());
    const double margin = std::sqrt(2.0 * target_energy);
    const double keep_out = std::sqrt(2.0 * box_factor * target_energy);

    std::vector<Interval> pieces{{*amin_it - margin, *amax_it + margin}};
    for (double wall : {a.values.front(), a.values.back()}) {
        std::vector<Interval> next;
        for (const auto& p : pieces) {
            if (p.hi <= wall - keep_out || p.lo >= wall + keep_out) {
                next.push_back(p);
                continue;
            }
            if (p.lo < wall - keep_out) next.push_back({p.lo, wall - keep_out});
            if (p.hi > wall + keep_out) next.push_back({wall + keep_out, p.hi});
        }
        pieces = std::move(next);
    }
    const auto best = std::max_element(pieces.begin(), pieces.end(),
                                       [](const Interval& l, const Interval& r) { return l.hi - l.lo < r.hi - r.lo; });
    if (best == pieces.end() || !(best->hi > best->lo)) {
        throw ValidationError("default_kgrid: box too small; every wave number puts a well next to a wall");
    }
    return KGrid(best->lo, best->hi, n_k);
}

FiberSweep sweep_fibers(const VectorPotential& a, const KGrid& kgrid, int n_max, const SweepOptions& options) {
    FiberSweep out{a, kgrid, std::vector<EigenSolution>(kgrid.size()), std::vector<std::vector<double>>(kgrid.size())};
    parallel_for(kgrid.size(), options.threads, [&](std::size_t j) {
        const double k = kgrid.k(j);
        try {
            const FiberOperator op = assemble_fiber(a, k);
            out.fibers[j] = solve_fiber(op, n_max, options.solve);
            out.velocities[j] = fh_velocity(out.fibers[j], a);
        } catch (const ValidationError& e) {
            std::ostringstream msg;
            msg << "sweep at k[" << j << "] = " << k << ": " << e.what();
            throw ValidationError(msg.str());
        } catch (const NumericalError& e) {
            std::ostringstream msg;
            msg << "sweep at k[" << j << "] = " << k << ": " << e.what();
            throw NumericalError(msg.str());
        }
    });
    return out;
}

std::vector<BandFunction> band_functions(const FiberSweep& sweep) {
    const std::size_t bands = sweep.bands();
    std::vector<BandFunction> funcs(bands);
    for (std::size_t n = 0; n < bands; ++n) {
        funcs[n].n = static_cast<int>(n);
        funcs[n].kgrid = sweep.kgrid;
        funcs[n].energies.resize(sweep.kgrid.size());
        funcs[n].velocities.resize(sweep.kgrid.size());
        for (std::size_t j = 0; j < sweep.kgrid.size(); ++j) {
            funcs[n].energies[j] = sweep.fibers[j].eigenvalues[n];
            funcs[n].velocities[j] = sweep.velocities[j][n];
        }
    }
    return funcs;
}

std::vector<BandFunction> sweep(const FieldRealization& field, const KGrid& kgrid, int n_max,
                                const SweepOptions& options) {
    return band_functions(sweep_fibers(vector_potential(field), kgrid, n_max, options));
}

BandStructure assemble_bands(std::span<const BandFunction> funcs, double tol_flat) {
    BandStructure bs;
    bs.tol_flat = tol_flat;
    if (funcs.empty() || funcs.front().energies.empty()) throw ValidationError("assemble_bands: empty sweep");
    bs.kgrid = funcs.front().kgrid;
    bs.n_max = funcs.back().n;
    for (const auto& f : funcs) {
        const auto [lo, hi] = std::minmax_element(f.energies.begin(), f.energies.end());
        BandInterval bi{f.n, *lo, *hi, *hi - *lo, false};
        bi.flat = bi.bandwidth <= tol_flat * std::max(1.0, bi.inf);
        bs.bands.push_back(bi);
    }
    return bs;
}

SpectrumClassification spectrum_sets(const BandStructure& bs) {
    SpectrumClassification out;
    std::vector<Interval> ac;
    for (const auto& b : bs.bands) {
        if (b.flat) {
            out.pp.push_back(0.5 * (b.inf + b.sup));
        } else {
            ac.push_back({b.inf, b.sup});
        }
    }
    std::sort(ac.begin(), ac.end(), [](const Interval& l, const Interval& r) { return l.lo < r.lo; });
    for (const auto& iv : ac) {
        if (!out.ac.empty() && iv.lo <= out.ac.back().hi) {
            out.ac.back().hi = std::max(out.ac.back().hi, iv.hi);
        } else {
            out.ac.push_back(iv);
        }
    }
    return out;
}

std::vector<Interval> velocity_bands(std::span<const BandFunction> funcs) {
    std::vector<Interval> out;
    out.reserve(funcs.size());
    for (const auto& f : funcs) {
        const auto [lo, hi] = std::minmax_element(f.velocities.begin(), f.velocities.end());
        out.push_back({*lo, *hi});
    }
    return out;
}

double verify_shift_covariance(const FieldRealization& field, double z, const KGrid& kgrid, int n_max,
                               const SweepOptions& options) {
    const FieldRealization shifted = shift_field(field, z);
    if (shifted.grid.size() == field.grid.size()) return 0.0;

    const VectorPotential a_full = vector_potential(field);
    const double a_z = a_full.values[field.grid.aligned_index(z)];

    // The translate of the shifted window inside the original box.
    const std::size_t count = shifted.grid.size();
    const std::size_t first = z > 0.0 ? field.grid.size() - count : 0;
    const Grid1D window(field.grid.x(first), field.grid.x(first + count - 1), count);
    VectorPotential a_base{window, std::vector<double>(a_full.values.begin() + static_cast<std::ptrdiff_t>(first),
                                                       a_full.values.begin() +
                                                           static_cast<std::ptrdiff_t>(first + count))};
    const VectorPotential a_shift = vector_potential(shifted);

    const KGrid shifted_k(kgrid.k_min() + a_z, kgrid.k_max() + a_z, kgrid.size());
    const FiberSweep lhs = sweep_fibers(a_shift, kgrid, n_max, options);
    const FiberSweep rhs = sweep_fibers(a_base, shifted_k, n_max, options);

    double dev = 0.0;
    for (std::size_t j = 0; j < kgrid.size(); ++j) {
        for (std::size_t n = 0; n < lhs.bands(); ++n) {
            dev = std::max(dev, std::abs(lhs.fibers[j].eigenvalues[n] - rhs.fibers[j].eigenvalues[n]));
        }
    }
    return dev;
}

}  // namespace umf
