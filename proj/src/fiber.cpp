#include "umf/fiber.hpp"

#include <lapacke.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "umf/error.hpp"

namespace umf {

EffectivePotential effective_potential(const VectorPotential& a, double k) {
    EffectivePotential v{a.grid, k, std::vector<double>(a.values.size())};
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = k - a.values[i];
        v.values[i] = 0.5 * d * d;
    }
    return v;
}

FiberOperator assemble_fiber(const VectorPotential& a, double k) {
    const Grid1D& g = a.grid;
    const double h = g.spacing();
    const double kinetic = 1.0 / (h * h);
    const std::size_t n = g.size();
    FiberOperator op;
    op.grid = g;
    op.k = k;
    op.off_diagonal = -0.5 * kinetic;
    op.diagonal.resize(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double d = k - a.values[i];
        op.diagonal[i - 1] = kinetic + 0.5 * d * d;
    }
    const double dl = k - a.values.front();
    const double dr = k - a.values.back();
    op.wall_potential_left = 0.5 * dl * dl;
    op.wall_potential_right = 0.5 * dr * dr;
    return op;
}

BoxAdequacy check_box_adequacy(const FiberOperator& op, double target_energy, double factor) {
    const double wall = std::min(op.wall_potential_left, op.wall_potential_right);
    if (wall < target_energy) return BoxAdequacy::inadequate;
    if (wall < factor * target_energy) return BoxAdequacy::marginal;
    return BoxAdequacy::ok;
}

EigenSolution solve_fiber(const FiberOperator& op, int n_max, const SolveOptions& options) {
    const auto interior = static_cast<lapack_int>(op.diagonal.size());
    if (n_max < 0 || n_max + 1 > interior) {
        std::ostringstream msg;
        msg << "solve_fiber: n_max + 1 = " << n_max + 1 << " exceeds the " << interior << " interior points";
        throw ValidationError(msg.str());
    }
    const lapack_int nev = n_max + 1;
    std::vector<double> d(op.diagonal);
    std::vector<double> e(static_cast<std::size_t>(interior), op.off_diagonal);
    std::vector<double> w(static_cast<std::size_t>(interior));
    std::vector<double> z(static_cast<std::size_t>(interior) * static_cast<std::size_t>(nev));
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(nev));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', interior, d.data(), e.data(), 0.0, 0.0, 1, nev,
                                           0.0, &found, w.data(), z.data(), interior, support.data());
    if (info != 0 || found != nev) {
        std::ostringstream msg;
        msg << "solve_fiber: dstevr failed (info " << info << ", found " << found << " of " << nev
            << ") for k = " << op.k << ", n = " << interior << ", h = " << op.grid.spacing()
            << ", diagonal range [" << *std::min_element(op.diagonal.begin(), op.diagonal.end()) << ", "
            << *std::max_element(op.diagonal.begin(), op.diagonal.end()) << "]";
        throw NumericalError(msg.str());
    }

    EigenSolution sol;
    sol.grid = op.grid;
    sol.k = op.k;
    sol.eigenvalues.assign(w.begin(), w.begin() + nev);
    if (!(sol.eigenvalues.front() > 0.0)) {
        std::ostringstream msg;
        msg << "solve_fiber: non-positive ground energy " << sol.eigenvalues.front() << " at k = " << op.k;
        throw NumericalError(msg.str());
    }
    for (lapack_int n = 1; n < nev; ++n) {
        const double lo = sol.eigenvalues[static_cast<std::size_t>(n - 1)];
        const double hi = sol.eigenvalues[static_cast<std::size_t>(n)];
        if (!(hi - lo > options.degeneracy_tolerance * std::abs(hi))) {
            std::ostringstream msg;
            msg << "solve_fiber: eigenvalues " << n - 1 << " and " << n << " collide (" << lo << ", " << hi
                << ") at k = " << op.k << "; refine the grid or shrink the box";
            throw NumericalError(msg.str());
        }
    }

    if (options.check_box) {
        const double target = sol.eigenvalues.back();
        switch (check_box_adequacy(op, target, options.box_factor)) {
            case BoxAdequacy::inadequate: {
                std::ostringstream msg;
                msg << "solve_fiber: wall potential " << std::min(op.wall_potential_left, op.wall_potential_right)
                    << " below eigenvalue " << target << " at k = " << op.k << "; eigenfunctions touch the wall";
                throw ValidationError(msg.str());
            }
            case BoxAdequacy::marginal:
                spdlog::warn("solve_fiber: wall potential {:.4g} below {}x eigenvalue {:.4g} at k = {:.4g}",
                             std::min(op.wall_potential_left, op.wall_potential_right), options.box_factor, target,
                             op.k);
                break;
            case BoxAdequacy::ok:
                break;
        }
    }

    const std::size_t n_grid = op.grid.size();
    const double scale = 1.0 / std::sqrt(op.grid.spacing());
    sol.eigenvectors.resize(static_cast<std::size_t>(nev));
    for (lapack_int col = 0; col < nev; ++col) {
        std::vector<double> phi(n_grid, 0.0);
        const double* src = z.data() + static_cast<std::size_t>(col) * static_cast<std::size_t>(interior);
        for (lapack_int i = 0; i < interior; ++i) phi[static_cast<std::size_t>(i) + 1] = scale * src[i];
        const auto lead = std::find_if(phi.begin(), phi.end(), [](double v) { return std::abs(v) > 1e-8; });
        if (lead != phi.end() && *lead < 0.0) {
            for (double& v : phi) v = -v;
        }
        sol.eigenvectors[static_cast<std::size_t>(col)] = std::move(phi);
    }
    return sol;
}

std::vector<double> fh_velocity(const EigenSolution& sol, const VectorPotential& a) {
    if (!(sol.grid == a.grid)) throw ValidationError("fh_velocity: eigen solution and potential use different grids");
    const double h = sol.grid.spacing();
    std::vector<double> v(sol.bands(), 0.0);
    for (std::size_t n = 0; n < sol.bands(); ++n) {
        const auto& phi = sol.eigenvectors[n];
        double s = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) s += phi[i] * phi[i] * (sol.k - a.values[i]);
        v[n] = h * s;
    }
    return v;
}

std::vector<bool> velocity_bound_check(const EigenSolution& sol, std::span<const double> velocities, double guard) {
    if (velocities.size() != sol.bands()) throw ValidationError("velocity_bound_check: length mismatch");
    std::vector<bool> ok(sol.bands());
    for (std::size_t n = 0; n < sol.bands(); ++n) {
        ok[n] = velocities[n] * velocities[n] < 2.0 * sol.eigenvalues[n] - guard;
    }
    return ok;
}

double recommended_spacing(double b_bar) {
    return 0.01 * std::min(1.0, 1.0 / std::sqrt(std::abs(b_bar)));
}

double recommended_half_length(double k_max, double target_energy, double b_bar) {
    return (std::abs(k_max) + std::sqrt(2.0 * target_energy * 4.0)) / std::abs(b_bar);
}

}  // namespace umf
