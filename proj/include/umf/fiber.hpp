#pragma once

#include <span>
#include <vector>

#include "umf/field.hpp"
#include "umf/grid.hpp"

namespace umf {

/// v_i = (k - a_i)^2 / 2 on the grid of the vector potential.
struct EffectivePotential {
    Grid1D grid;
    double k = 0.0;
    std::vector<double> values;
};

EffectivePotential effective_potential(const VectorPotential& a, double k);

/// Three-point discretization of (1/2)[P^2 + (k - a)^2] with Dirichlet walls
/// at the two grid endpoints. The unknowns are the n - 2 interior points, so
/// `diagonal` has grid.size() - 2 entries: 1/h^2 + v_i.
struct FiberOperator {
    Grid1D grid;
    double k = 0.0;
    std::vector<double> diagonal;
    double off_diagonal = 0.0;  ///< -1 / (2 h^2)
    double wall_potential_left = 0.0;
    double wall_potential_right = 0.0;
};

FiberOperator assemble_fiber(const VectorPotential& a, double k);

enum class BoxAdequacy { ok, marginal, inadequate };

/// ok if both wall potentials reach factor * target_energy, inadequate if one
/// lies below target_energy, marginal otherwise.
BoxAdequacy check_box_adequacy(const FiberOperator& op, double target_energy, double factor = 4.0);

/// Lowest eigenpairs of one fiber. Eigenvectors are full-grid functions (zero
/// at the walls), orthonormal under the weight h, with the first component of
/// magnitude > 1e-8 positive.
struct EigenSolution {
    Grid1D grid;
    double k = 0.0;
    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> eigenvectors;

    std::size_t bands() const { return eigenvalues.size(); }
};

struct SolveOptions {
    /// adjacent eigenvalues closer than this (relative) are treated as a collision
    double degeneracy_tolerance = 1e-9;
    /// walls are checked against the highest computed eigenvalue
    bool check_box = true;
    double box_factor = 4.0;
};

/// Eigenpairs 0..n_max. Throws ValidationError if n_max + 1 > n - 2 or the box
/// is inadequate, NumericalError on eigensolver failure, collisions or a
/// non-positive ground energy. Marginal boxes log a warning.
EigenSolution solve_fiber(const FiberOperator& op, int n_max, const SolveOptions& options = {});

/// Feynman-Hellmann slopes d eps_n / dk = h sum_i phi_n(x_i)^2 (k - a_i).
std::vector<double> fh_velocity(const EigenSolution& sol, const VectorPotential& a);

/// Per band: (d eps_n/dk)^2 < 2 eps_n - guard.
std::vector<bool> velocity_bound_check(const EigenSolution& sol, std::span<const double> velocities,
                                       double guard = 1e-8);

/// Spacing that resolves the magnetic length 1/sqrt(b_bar).
double recommended_spacing(double b_bar);
/// Half-length keeping turning points of wave numbers up to k_max inside the box.
double recommended_half_length(double k_max, double target_energy, double b_bar);

}  // namespace umf
