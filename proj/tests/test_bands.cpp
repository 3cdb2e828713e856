#include <doctest.h>

#include <cmath>

#include "umf/bands.hpp"
#include "umf/error.hpp"

using namespace umf;

namespace {

SweepOptions threads(std::size_t n) {
    SweepOptions o;
    o.threads = n;
    return o;
}

}  // namespace

TEST_SUITE("bands") {
    TEST_CASE("k grid") {
        const KGrid g(-1.0, 1.0, 5);
        CHECK(g.spacing() == doctest::Approx(0.5));
        CHECK(g.k(0) == -1.0);
        CHECK(g.k(2) == doctest::Approx(0.0));
        CHECK(g.k(4) == 1.0);
        CHECK_THROWS_AS(KGrid(1.0, 1.0, 5), ValidationError);
        CHECK_THROWS_AS(KGrid(0.0, 1.0, 1), ValidationError);
        CHECK_THROWS_AS(KGrid(0.0, NAN, 3), ValidationError);
    }

    TEST_CASE("default window avoids the walls") {
        const auto field = sample_field(ConstantField{1.0}, Grid1D::with_spacing(-20.0, 20.0, 0.05));
        const auto a = vector_potential(field);
        const double target = default_target_energy(field, 3);
        CHECK(target == doctest::Approx(4.0));
        const KGrid g = default_kgrid(a, 11, target);
        CHECK(g.k_min() > -20.0);
        CHECK(g.k_max() < 20.0);
        CHECK(g.k_max() - g.k_min() > 20.0);
        CHECK_NOTHROW(sweep(field, g, 3));
        const auto tiny = vector_potential(sample_field(ConstantField{1.0}, Grid1D::with_spacing(-2.0, 2.0, 0.05)));
        CHECK_THROWS_AS(default_kgrid(tiny, 11, 4.0), ValidationError);
    }

    TEST_CASE("Landau bands are flat") {
        const auto field = sample_field(ConstantField{1.0}, Grid1D::with_spacing(-15.0, 15.0, 0.02));
        const auto funcs = sweep(field, KGrid(-5.0, 5.0, 41), 3);
        REQUIRE(funcs.size() == 4);
        const auto bs = assemble_bands(funcs);
        for (const auto& b : bs.bands) {
            CHECK(b.flat);
            CHECK(std::abs(b.inf - (b.n + 0.5)) < 1e-3);
        }
        const auto spec = spectrum_sets(bs);
        CHECK(spec.ac.empty());
        REQUIRE(spec.pp.size() == 4);
        for (const auto& v : velocity_bands(funcs)) {
            CHECK(std::abs(v.lo) < 1e-6);
            CHECK(std::abs(v.hi) < 1e-6);
        }
    }

    TEST_CASE("Iwatsuka band interpolates between the asymptotic Landau levels") {
        const auto field = sample_field(TanhField{1.0, 3.0, 2.0}, Grid1D::with_spacing(-40.0, 40.0, 0.01));
        const auto funcs = sweep(field, KGrid(-20.0, 40.0, 7), 0);
        CHECK(std::abs(funcs[0].energies.front() - 0.5) < 1e-3);
        CHECK(std::abs(funcs[0].energies.back() - 1.5) < 1e-3);
        for (std::size_t j = 1; j < funcs[0].energies.size(); ++j) CHECK(funcs[0].energies[j] > funcs[0].energies[j - 1] - 1e-12);
        for (double v : funcs[0].velocities) CHECK(v > -1e-9);
        const auto bs = assemble_bands(funcs);
        CHECK_FALSE(bs.bands[0].flat);
        const auto spec = spectrum_sets(bs);
        REQUIRE(spec.ac.size() == 1);
        CHECK(spec.pp.empty());
    }

    TEST_CASE("snake ground band at k = 0") {
        const auto field = sample_field(StepField{-1.0, 1.0}, Grid1D::with_spacing(-12.0, 12.0, 5e-4));
        const auto funcs = sweep(field, KGrid(-0.5, 0.5, 3), 0);
        CHECK(std::abs(funcs[0].energies[1] - 0.5) < 1e-3);
        CHECK(funcs[0].energies[0] > funcs[0].energies[1]);
        CHECK(funcs[0].energies[2] < funcs[0].energies[1]);
    }

    TEST_CASE("spectrum classification merges overlapping bands") {
        BandStructure bs;
        bs.bands = {{0, 0.5, 0.5, 0.0, true}, {1, 1.0, 2.0, 1.0, false}, {2, 1.5, 3.0, 1.5, false},
                    {3, 4.0, 5.0, 1.0, false}};
        const auto s = spectrum_sets(bs);
        REQUIRE(s.pp.size() == 1);
        CHECK(s.pp[0] == 0.5);
        REQUIRE(s.ac.size() == 2);
        CHECK(s.ac[0].lo == 1.0);
        CHECK(s.ac[0].hi == 3.0);
        CHECK(s.ac[1].lo == 4.0);
        CHECK(s.ac[1].hi == 5.0);

        BandFunction f{0, KGrid(0.0, 1.0, 3), {1.0, 1.0 + 5e-7, 1.0}, {0.0, 0.0, 0.0}};
        std::vector<BandFunction> one{f};
        CHECK(assemble_bands(one).bands[0].flat);
        CHECK_FALSE(assemble_bands(one, 1e-7).bands[0].flat);
        CHECK_THROWS_AS(assemble_bands(std::vector<BandFunction>{}), ValidationError);
    }

    TEST_CASE("Gaussian field has no flat bands") {
        const Grid1D grid = Grid1D::with_spacing(-30.0, 30.0, 0.02);
        const auto field = sample_field(GaussianField{1.0, GaussianKernel{0.1, 1.0}}, grid, 5);
        const auto a = vector_potential(field);
        const KGrid kg = default_kgrid(a, 41, default_target_energy(field, 2));
        const auto bs = assemble_bands(sweep(field, kg, 2));
        for (const auto& b : bs.bands) CHECK_FALSE(b.flat);
        CHECK(spectrum_sets(bs).pp.empty());
    }

    TEST_CASE("results do not depend on the thread count") {
        const auto field = sample_field(PoissonField{1.0, BumpProfile{1.0, 0.5}}, Grid1D::with_spacing(-15.0, 15.0, 0.02), 3);
        const KGrid kg(-3.0, 3.0, 23);
        const auto one = sweep(field, kg, 2, threads(1));
        const auto four = sweep(field, kg, 2, threads(4));
        for (std::size_t n = 0; n < one.size(); ++n) {
            CHECK(one[n].energies == four[n].energies);
            CHECK(one[n].velocities == four[n].velocities);
        }
    }

    TEST_CASE("shift covariance") {
        const KGrid kg(-2.0, 2.0, 9);
        const auto landau = sample_field(ConstantField{1.0}, Grid1D::with_spacing(-15.0, 15.0, 0.02));
        CHECK(verify_shift_covariance(landau, 0.0, kg, 2) == 0.0);
        CHECK(verify_shift_covariance(landau, 2.0, kg, 2) < 1e-9);
        const auto poisson = sample_field(PoissonField{1.0, BumpProfile{1.0, 0.5}},
                                          Grid1D::with_spacing(-20.0, 20.0, 0.02), 42);
        CHECK(verify_shift_covariance(poisson, 2.0, kg, 2) < 1e-6);
        CHECK(verify_shift_covariance(poisson, -1.5, kg, 2) < 1e-6);
    }

    TEST_CASE("localized fibers do not see a distant box edge") {
        const Grid1D big = Grid1D::with_spacing(-40.0, 40.0, 0.02);
        const std::size_t first = big.aligned_index(-20.0);
        const std::size_t count = big.aligned_index(20.0) - first + 1;
        const KGrid kg(-2.0, 2.0, 5);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto full = sample_field(PoissonField{1.0, BumpProfile{1.0, 0.5}}, big, seed);
            const auto part = restrict_field(full, first, count);
            const auto fb = sweep(full, kg, 1);
            const auto pb = sweep(part, kg, 1);
            for (std::size_t n = 0; n < 2; ++n)
                for (std::size_t j = 0; j < kg.size(); ++j) CHECK(std::abs(fb[n].energies[j] - pb[n].energies[j]) < 1e-8);
        }
    }
}
