#include <doctest.h>

#include <cmath>
#include <numbers>

#include "umf/dynamics.hpp"
#include "umf/error.hpp"

using namespace umf;

namespace {

std::shared_ptr<const PacketBasis> basis_for(const FieldSpec& spec, const Grid1D& grid, const KGrid& kg, int n_max,
                                             std::optional<std::uint64_t> seed = {}) {
    const auto a = vector_potential(sample_field(spec, grid, seed));
    return make_packet_basis(sweep_fibers(a, kg, n_max));
}

std::shared_ptr<const PacketBasis> landau(int n_max) {
    static std::shared_ptr<const PacketBasis> cache[4];
    auto& b = cache[n_max];
    if (!b) b = basis_for(ConstantField{1.0}, Grid1D::with_spacing(-15.0, 15.0, 0.02), KGrid(-5.0, 5.0, 201), n_max);
    return b;
}

std::shared_ptr<const PacketBasis> iwatsuka(int n_max) {
    static std::shared_ptr<const PacketBasis> cache[4];
    auto& b = cache[n_max];
    if (!b)
        b = basis_for(TanhField{1.0, 3.0, 2.0}, Grid1D::with_spacing(-40.0, 40.0, 0.02), KGrid(-4.0, 4.0, 161), n_max);
    return b;
}

PacketSpec gaussian_profile(double x1_center, double x1_width, double min_capture) {
    PacketSpec s;
    s.profile = PacketProfile::gaussian;
    s.x1_center = x1_center;
    s.x1_width = x1_width;
    s.min_capture = min_capture;
    return s;
}

std::complex<double> inner(const FiberedWavePacket& a, const FiberedWavePacket& b) {
    std::complex<double> s = 0.0;
    for (Eigen::Index j = 0; j < a.coefficients.cols(); ++j) s += a.coefficients.col(j).dot(b.coefficients.col(j));
    return s * a.basis->dk();
}

}  // namespace

TEST_SUITE("dynamics") {
    TEST_CASE("packet preparation") {
        const auto p = prepare_packet(landau(0), PacketSpec{});
        CHECK(p.capture == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(norm(p) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(energy(p) == doctest::Approx(0.5).epsilon(1e-3));

        const auto multi = prepare_packet(landau(3), gaussian_profile(0.0, 0.7, 0.99));
        CHECK(multi.capture >= 0.99);
        CHECK(multi.capture <= 1.0);
        CHECK(norm(multi) == doctest::Approx(1.0).epsilon(1e-12));

        // a displaced narrow profile needs many more levels than four
        CHECK_THROWS_AS(prepare_packet(landau(3), gaussian_profile(3.0, 0.3, 0.999)), ValidationError);
        const auto partial = prepare_packet(landau(3), gaussian_profile(3.0, 0.3, 0.0));
        CHECK(partial.capture < 0.9);

        PacketSpec edge;
        edge.k_center = 4.0;
        CHECK_THROWS_AS(prepare_packet(landau(0), edge), ValidationError);
        PacketSpec bad;
        bad.k_width = 0.0;
        CHECK_THROWS_AS(prepare_packet(landau(0), bad), ValidationError);
        CHECK_THROWS_AS(prepare_packet(nullptr, PacketSpec{}), ValidationError);
    }

    TEST_CASE("evolution is unitary and conserves energy") {
        const auto p = prepare_packet(iwatsuka(3), gaussian_profile(0.0, 0.7, 0.98));
        const double e0 = energy(p);
        for (double t : {1.0, 10.0, 1000.0}) {
            const auto q = evolve(p, t);
            CHECK(std::abs(norm(q) - 1.0) < 1e-12);
            CHECK(std::abs(energy(q) - e0) < 1e-12 * e0);
            CHECK(q.time == t);
        }
    }

    TEST_CASE("Landau packets are periodic and do not drift") {
        const auto p = prepare_packet(landau(3), gaussian_profile(0.5, 0.7, 0.99));
        const double period = 2.0 * std::numbers::pi;
        CHECK(std::abs(std::abs(inner(p, evolve(p, period))) - 1.0) < 1e-6);
        CHECK(std::abs(inner(p, evolve(p, 0.5 * period))) < 0.999);

        const auto v = asymptotic_velocity_apply(p);
        CHECK(std::sqrt(inner(v, v).real()) < 1e-8);

        const auto single = prepare_packet(landau(0), PacketSpec{});
        const double q10 = q1_moment(single);
        for (double t : {0.7, 3.0, 50.0}) CHECK(std::abs(q1_moment(evolve(single, t)) - q10) < 1e-12);
    }

    TEST_CASE("averaged phase") {
        CHECK(averaged_phase(0.0, 5.0) == std::complex<double>(1.0, 0.0));
        const auto small = averaged_phase(1e-9, 1.0);
        CHECK(std::abs(small - std::complex<double>(1.0, 5e-10)) < 1e-15);
        const double x = 2.0;
        const auto big = averaged_phase(1.0, x);
        const auto expected = (std::exp(std::complex<double>(0.0, x)) - 1.0) / std::complex<double>(0.0, x);
        CHECK(std::abs(big - expected) < 1e-15);
        CHECK(std::abs(averaged_phase(1.0, 1e8)) < 1e-7);
        // continuity across the series switch
        CHECK(std::abs(averaged_phase(1.0, 1e-6 * (1.0 - 1e-9)) - averaged_phase(1.0, 1e-6 * (1.0 + 1e-9))) < 1e-9);
    }

    TEST_CASE("band matrix") {
        const auto b = iwatsuka(3);
        for (std::size_t j = 0; j < b->k_points(); j += 20) {
            const auto& m = b->velocity.band_matrix[j];
            CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-12);
            for (Eigen::Index n = 0; n < m.rows(); ++n)
                CHECK(std::abs(m(n, n) - b->velocity.velocities[j](n)) < 1e-10);
        }
        // neighbouring states overlap positively after sign alignment
        const double h = b->sweep.potential.grid.spacing();
        for (std::size_t j = 1; j < b->k_points(); ++j) {
            const Eigen::MatrixXd o = h * b->states(j - 1).transpose() * b->states(j);
            for (Eigen::Index n = 0; n < o.rows(); ++n) REQUIRE(o(n, n) > 0.0);
        }
    }

    TEST_CASE("velocity kernels") {
        const auto p = prepare_packet(iwatsuka(3), gaussian_profile(0.0, 0.7, 0.98));
        const auto delta = apply_band_kernel(p, [](double d) { return std::complex<double>(d == 0.0 ? 1.0 : 0.0); });
        const auto asym = asymptotic_velocity_apply(p);
        CHECK((delta.coefficients - asym.coefficients).cwiseAbs().maxCoeff() < 1e-8);

        const auto far = time_averaged_velocity_apply(p, 1e9);
        CHECK((far.coefficients - asym.coefficients).cwiseAbs().maxCoeff() < 1e-6);
        CHECK_THROWS_AS(time_averaged_velocity_apply(p, 0.0), ValidationError);

        // (d eps/dk)^2 < 2 eps gives ||V psi||^2 <= 2 <psi, H psi>
        CHECK(inner(asym, asym).real() <= 2.0 * energy(p));
        const auto avg = time_averaged_velocity_apply(p, 10.0);
        CHECK(std::isfinite(inner(avg, avg).real()));
    }

    TEST_CASE("single band: the time average is the asymptotic velocity") {
        const auto p = prepare_packet(iwatsuka(0), PacketSpec{});
        const auto asym = asymptotic_velocity_apply(p);
        for (double t : {0.5, 10.0, 300.0}) {
            CHECK((time_averaged_velocity_apply(p, t).coefficients - asym.coefficients).cwiseAbs().maxCoeff() < 1e-14);
            CHECK(ballistic_residual(p, t) == doctest::Approx(q2_norm(p) / t).epsilon(1e-10));
        }
    }

    TEST_CASE("snake ground band drifts at -1/sqrt(pi)") {
        const auto b = basis_for(StepField{-1.0, 1.0}, Grid1D::with_spacing(-12.0, 12.0, 0.01), KGrid(-0.8, 0.8, 161), 0);
        PacketSpec s;
        s.k_width = 0.1;
        const auto p = prepare_packet(b, s);
        const double mean_velocity = inner(p, asymptotic_velocity_apply(p)).real();
        const double oracle = -1.0 / std::sqrt(std::numbers::pi);
        CHECK(std::abs(mean_velocity - oracle) < 0.05 * std::abs(oracle));
        const ResidualEvaluator r(p);
        CHECK(std::abs((r.q2_mean(200.0) - r.q2_mean(0.0)) / 200.0 - mean_velocity) < 1e-10);
    }

    TEST_CASE("Heisenberg drift matches a direct Q2 expectation") {
        const auto b = iwatsuka(3);
        const auto p = prepare_packet(b, gaussian_profile(0.0, 0.7, 0.98));
        const double h = b->sweep.potential.grid.spacing();
        for (double t : {0.0, 2.0, 5.0}) {
            const auto pt = evolve(p, t);
            const Eigen::MatrixXcd q2 = q2_apply(pt);
            std::complex<double> direct = 0.0;
            for (std::size_t j = 0; j < b->k_points(); ++j) {
                const Eigen::VectorXcd psi = b->states(j).cast<std::complex<double>>() * pt.coefficients.col(j);
                direct += psi.dot(q2.col(j));
            }
            const double d = direct.real() * h * b->dk();
            CHECK(std::abs(d - q2_mean(p, t)) < 1e-4 * (1.0 + std::abs(d)));
        }
    }

    TEST_CASE("ballistic residual") {
        const auto p = prepare_packet(iwatsuka(3), gaussian_profile(0.0, 0.7, 0.98));
        const ResidualEvaluator r(p);
        CHECK(r.residual(100.0) < r.residual(10.0));
        CHECK(r.residual(10.0) == doctest::Approx(ballistic_residual(p, 10.0)));
        CHECK(r.q2_norm() == doctest::Approx(q2_norm(p)));
        CHECK_THROWS_AS(r.residual(0.0), ValidationError);
        CHECK_THROWS_AS(ballistic_residual(p, 0.0), ValidationError);

        // Landau: no drift, so the residual is the bounded cyclotron orbit over t
        const auto lp = prepare_packet(landau(0), PacketSpec{});
        const ResidualEvaluator lr(lp);
        for (double t : {10.0, 100.0, 1000.0}) CHECK(lr.residual(t) < lr.q2_norm() / t + 1e-6);
        const auto mp = prepare_packet(landau(3), gaussian_profile(0.5, 0.7, 0.99));
        const ResidualEvaluator mr(mp);
        const double c = 100.0 * mr.residual(100.0);
        for (double t : {300.0, 1000.0, 3000.0}) CHECK(t * mr.residual(t) < 2.0 * c);
    }

    TEST_CASE("localization bound holds along the orbit") {
        const auto p = prepare_packet(iwatsuka(3), gaussian_profile(0.0, 0.7, 0.98));
        const auto bound = localization_bound(p);
        CHECK(bound.b_bar > 0.9);
        CHECK(bound.kinetic == doctest::Approx(std::sqrt(energy(p))));
        for (double t : log_spaced_times(1.0, 1e4, 12)) CHECK(q1_moment(evolve(p, t)) <= bound.value);
        CHECK(a_moment(p) > 0.0);
    }

    TEST_CASE("simulation series") {
        const auto p = prepare_packet(iwatsuka(1), PacketSpec{});
        const auto times = log_spaced_times(1.0, 100.0, 5);
        REQUIRE(times.size() == 5);
        CHECK(times.front() == doctest::Approx(1.0));
        CHECK(times[2] == doctest::Approx(10.0));
        CHECK(times.back() == doctest::Approx(100.0));
        const auto s = simulate(p, times);
        REQUIRE(s.norm.size() == 5);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(std::abs(s.norm[i] - 1.0) < 1e-12);
            CHECK(s.ballistic_residual[i] == doctest::Approx(ballistic_residual(p, times[i])));
        }
        CHECK_THROWS_AS(simulate(p, {1.0, 0.0}), ValidationError);
        CHECK_THROWS_AS(log_spaced_times(0.0, 1.0, 3), ValidationError);
        CHECK_THROWS_AS(log_spaced_times(1.0, 10.0, 1), ValidationError);
    }
}
