#include <doctest.h>

#include <cmath>
#include <numbers>

#include "umf/error.hpp"
#include "umf/fiber.hpp"

using namespace umf;

namespace {

VectorPotential potential_of(const FieldSpec& spec, const Grid1D& grid) {
    return vector_potential(sample_field(spec, grid));
}

EigenSolution solve(const VectorPotential& a, double k, int n_max) {
    return solve_fiber(assemble_fiber(a, k), n_max);
}

}  // namespace

TEST_SUITE("fiber") {
    TEST_CASE("effective potential") {
        const auto a = potential_of(ConstantField{1.0}, Grid1D(-2.0, 2.0, 5));
        const auto v = effective_potential(a, 1.0);
        const std::vector<double> expected = {4.5, 2.0, 0.5, 0.0, 0.5};
        for (std::size_t i = 0; i < 5; ++i) CHECK(v.values[i] == doctest::Approx(expected[i]));
        CHECK(v.k == 1.0);
    }

    TEST_CASE("assembled tridiagonal matrix") {
        const auto unit = potential_of(ConstantField{1.0}, Grid1D(-2.0, 2.0, 5));
        const auto op = assemble_fiber(unit, 0.0);
        REQUIRE(op.diagonal.size() == 3);
        CHECK(op.diagonal[0] == doctest::Approx(1.5));
        CHECK(op.diagonal[1] == doctest::Approx(1.0));
        CHECK(op.diagonal[2] == doctest::Approx(1.5));
        CHECK(op.off_diagonal == doctest::Approx(-0.5));

        const auto lin = potential_of(ConstantField{1.0}, Grid1D::with_spacing(-4.0, 4.0, 0.5));
        const auto op2 = assemble_fiber(lin, 1.0);
        CHECK(op2.wall_potential_left == doctest::Approx(12.5));
        CHECK(op2.wall_potential_right == doctest::Approx(4.5));
        CHECK(op2.diagonal[0] == doctest::Approx(4.0 + 0.5 * 4.5 * 4.5));
    }

    TEST_CASE("Landau levels") {
        const auto a = potential_of(ConstantField{1.0}, Grid1D::with_spacing(-15.0, 15.0, 0.02));
        const auto ref = solve(a, 0.0, 3);
        for (int n = 0; n <= 3; ++n) CHECK(std::abs(ref.eigenvalues[n] - (n + 0.5)) < 1e-3);
        for (double k : {-5.0, -2.3, 1.7, 5.0}) {
            const auto sol = solve(a, k, 3);
            for (int n = 0; n <= 3; ++n) CHECK(std::abs(sol.eigenvalues[n] - ref.eigenvalues[n]) < 1e-6);
            const auto v = fh_velocity(sol, a);
            for (double s : v) CHECK(std::abs(s) < 1e-6);
        }
        const double b = 2.5;
        const auto a2 = potential_of(ConstantField{b}, Grid1D::with_spacing(-10.0, 10.0, 0.01));
        const auto sol = solve(a2, 0.0, 2);
        for (int n = 0; n <= 2; ++n) CHECK(std::abs(sol.eigenvalues[n] - b * (n + 0.5)) < 1e-3);
    }

    TEST_CASE("eigenvector normalization and sign convention") {
        const auto a = potential_of(TanhField{1.0, 3.0, 2.0}, Grid1D::with_spacing(-20.0, 20.0, 0.02));
        const auto sol = solve(a, 0.7, 4);
        const double h = sol.grid.spacing();
        for (std::size_t n = 0; n < sol.bands(); ++n) {
            const auto& phi = sol.eigenvectors[n];
            CHECK(phi.front() == 0.0);
            CHECK(phi.back() == 0.0);
            for (double v : phi) {
                if (std::abs(v) > 1e-8) {
                    CHECK(v > 0.0);
                    break;
                }
            }
            for (std::size_t m = 0; m <= n; ++m) {
                double s = 0.0;
                for (std::size_t i = 0; i < phi.size(); ++i) s += h * phi[i] * sol.eigenvectors[m][i];
                CHECK(std::abs(s - (m == n ? 1.0 : 0.0)) < 1e-10);
            }
            if (n > 0) CHECK(sol.eigenvalues[n] > sol.eigenvalues[n - 1]);
        }
    }

    TEST_CASE("snake ground fiber") {
        // the kink in a costs O(h) in the energies, hence the fine grid
        const auto a = potential_of(StepField{-1.0, 1.0}, Grid1D::with_spacing(-12.0, 12.0, 5e-4));
        const auto sol = solve(a, 0.0, 1);
        CHECK(std::abs(sol.eigenvalues[0] - 0.5) < 1e-3);
        CHECK(std::abs(sol.eigenvalues[1] - 1.5) < 1e-3);
        // |phi_0|^2 = exp(-x^2)/sqrt(pi), so <k - |x|> at k = 0 is -1/sqrt(pi)
        const auto v = fh_velocity(sol, a);
        CHECK(std::abs(v[0] + 1.0 / std::sqrt(std::numbers::pi)) < 1e-3);
        const auto ok = velocity_bound_check(sol, v);
        CHECK(ok[0]);
        CHECK(ok[1]);
    }

    TEST_CASE("reflection symmetry of the step field") {
        // a(x) = |x| up to an O(h) offset on x < 0, so fibers are even up to O(h)
        const double h = 0.01;
        const auto a = potential_of(StepField{-1.0, 1.0}, Grid1D::with_spacing(-10.0, 10.0, h));
        const auto sol = solve(a, 1.0, 2);
        const std::size_t n = sol.eigenvectors[0].size();
        for (std::size_t i = 0; i < n; i += 97) {
            CHECK(std::abs(sol.eigenvectors[0][i] - sol.eigenvectors[0][n - 1 - i]) < 2.0 * h);
            CHECK(std::abs(sol.eigenvectors[1][i] + sol.eigenvectors[1][n - 1 - i]) < 2.0 * h);
        }
    }

    TEST_CASE("Feynman-Hellmann agrees with finite differences") {
        const auto a = potential_of(TanhField{1.0, 3.0, 2.0}, Grid1D::with_spacing(-25.0, 25.0, 0.02));
        const double step = 1e-4;
        for (double k : {-2.0, 0.3, 2.5}) {
            const auto v = fh_velocity(solve(a, k, 3), a);
            const auto up = solve(a, k + step, 3), down = solve(a, k - step, 3);
            for (int n = 0; n <= 3; ++n) {
                const double fd = (up.eigenvalues[n] - down.eigenvalues[n]) / (2.0 * step);
                CHECK(std::abs(fd - v[n]) < 1e-4);
            }
            for (bool b : velocity_bound_check(solve(a, k, 3), v)) CHECK(b);
        }
    }

    TEST_CASE("velocity bound flags violations") {
        const auto a = potential_of(ConstantField{1.0}, Grid1D::with_spacing(-10.0, 10.0, 0.05));
        const auto sol = solve(a, 0.0, 1);
        const std::vector<double> fake = {0.0, 10.0};
        const auto ok = velocity_bound_check(sol, fake);
        CHECK(ok[0]);
        CHECK_FALSE(ok[1]);
        CHECK_THROWS_AS(velocity_bound_check(sol, std::vector<double>{0.0}), ValidationError);
    }

    TEST_CASE("second-order convergence in h") {
        std::vector<double> e;
        for (double h : {0.1, 0.05, 0.025}) {
            const auto a = potential_of(ConstantField{1.0}, Grid1D::with_spacing(-10.0, 10.0, h));
            e.push_back(solve(a, 0.0, 0).eigenvalues[0]);
        }
        const double ratio = (e[0] - e[1]) / (e[1] - e[2]);
        CHECK(ratio > 3.5);
        CHECK(ratio < 4.5);
    }

    TEST_CASE("mollified step converges to the step") {
        const Grid1D grid = Grid1D::with_spacing(-12.0, 12.0, 0.005);
        const auto step = solve(potential_of(StepField{-1.0, 1.0}, grid), 0.5, 1);
        // a shifts by O(w) away from the wall, so the gap closes linearly in w
        std::vector<double> d;
        for (double w : {0.4, 0.2, 0.1, 0.05}) {
            const auto sol = solve(potential_of(TanhField{-1.0, 1.0, w}, grid), 0.5, 1);
            d.push_back(std::abs(sol.eigenvalues[0] - step.eigenvalues[0]));
        }
        for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] < 0.6 * d[i - 1]);
    }

    TEST_CASE("error cases") {
        const auto a = potential_of(ConstantField{1.0}, Grid1D(-2.0, 2.0, 6));
        CHECK_THROWS_AS(solve_fiber(assemble_fiber(a, 0.0), 4), ValidationError);
        CHECK_THROWS_AS(solve_fiber(assemble_fiber(a, 0.0), -1), ValidationError);
        // box much too small for the requested levels
        const auto small = potential_of(ConstantField{1.0}, Grid1D::with_spacing(-2.0, 2.0, 0.01));
        CHECK_THROWS_AS(solve_fiber(assemble_fiber(small, 0.0), 5), ValidationError);
        SolveOptions loose;
        loose.check_box = false;
        CHECK_NOTHROW(solve_fiber(assemble_fiber(small, 0.0), 5, loose));
        // symmetric double well: near-degenerate pair
        const auto snake = potential_of(StepField{-1.0, 1.0}, Grid1D::with_spacing(-20.0, 20.0, 0.05));
        CHECK_THROWS_AS(solve_fiber(assemble_fiber(snake, 10.0), 1), NumericalError);
        CHECK(check_box_adequacy(assemble_fiber(small, 0.0), 0.4) == BoxAdequacy::ok);
        CHECK(check_box_adequacy(assemble_fiber(small, 0.0), 1.0) == BoxAdequacy::marginal);
        CHECK(check_box_adequacy(assemble_fiber(small, 0.0), 3.0) == BoxAdequacy::inadequate);
    }
}
