#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "umf/error.hpp"
#include "umf/field.hpp"

using namespace umf;

namespace {

struct Moments {
    double mean = 0.0;
    double se = 0.0;
};

template <class F>
Moments monte_carlo(int n, F&& draw) {
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = draw(i);
        s += v;
        s2 += v * v;
    }
    const double m = s / n;
    return {m, std::sqrt((s2 / n - m * m) / (n - 1))};
}

}  // namespace

TEST_SUITE("sampling") {
    TEST_CASE("random specs need a seed and are pure functions of it") {
        const Grid1D grid = Grid1D::with_spacing(-10.0, 10.0, 0.05);
        const std::vector<FieldSpec> specs = {
            GaussianField{1.0, GaussianKernel{1.0, 1.0}},
            GaussianField{1.0, ExponentialKernel{1.0, 1.0}, GaussianSampler::karhunen_loeve, 5.0, 20},
            SquaredGaussianField{1.0, GaussianField{0.0, GaussianKernel{1.0, 1.0}}},
            PoissonField{2.0, BumpProfile{1.0, 0.5}},
            LatticeField{UniformDistribution{0.0, 2.0}, BumpProfile{1.0, 0.5}},
        };
        for (const auto& spec : specs) {
            CHECK_THROWS_AS(sample_field(spec, grid), ValidationError);
            const auto a = sample_field(spec, grid, 9), b = sample_field(spec, grid, 9), c = sample_field(spec, grid, 10);
            CHECK(a.values == b.values);
            CHECK(a.values != c.values);
            CHECK(a.seed == std::optional<std::uint64_t>(9));
            CHECK(a.spec_id == spec_kind(spec));
        }
        CHECK_THROWS_AS(sample_field(PoissonField{0.0, BumpProfile{}}, grid, 1), ValidationError);
        CHECK_THROWS_AS(sample_field(GaussianField{0.0, GaussianKernel{}}, grid, 1), ValidationError);
        CHECK_THROWS_AS(sample_field(SquaredGaussianField{0.0, GaussianField{}}, grid, 1), ValidationError);
    }

    TEST_CASE("squared Gaussian never drops below its infimum") {
        const Grid1D grid = Grid1D::with_spacing(-20.0, 20.0, 0.05);
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto f = sample_field(SquaredGaussianField{0.7, GaussianField{0.3, GaussianKernel{2.0, 0.5}}}, grid, s);
            for (double v : f.values) REQUIRE(v >= 0.7);
        }
    }

    TEST_CASE("degenerate Gaussian and KL with no modes give the mean") {
        const Grid1D grid = Grid1D::with_spacing(-5.0, 5.0, 0.1);
        const GaussianField flat{1.5, GaussianKernel{0.0, 1.0}};
        for (double v : sample_gaussian_circulant(flat, grid, 3).values) CHECK(v == 1.5);
        const GaussianField g{1.5, GaussianKernel{1.0, 1.0}};
        for (double v : sample_gaussian_kl(g, grid, 4.0, 0, 3).values) CHECK(v == 1.5);
        const auto kl = sample_gaussian_kl(g, grid, 2.0, 10, 3);
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (std::abs(grid.x(i)) > 2.0 + 1e-9) CHECK(kl.values[i] == 1.5);
    }

    TEST_CASE("circulant covariance matches the kernel") {
        const Grid1D grid = Grid1D::with_spacing(-8.0, 8.0, 0.05);
        const GaussianField g{0.5, GaussianKernel{1.0, 1.0}};
        const std::size_t i0 = grid.aligned_index(0.0), i1 = grid.aligned_index(1.0);
        std::vector<double> x0(10000), x1(10000);
        for (int s = 0; s < 10000; ++s) {
            const auto f = sample_gaussian_circulant(g, grid, static_cast<std::uint64_t>(s));
            x0[s] = f.values[i0] - 0.5;
            x1[s] = f.values[i1] - 0.5;
        }
        const Moments c0 = monte_carlo(10000, [&](int s) { return x0[s] * x0[s]; });
        const Moments c1 = monte_carlo(10000, [&](int s) { return x0[s] * x1[s]; });
        const Moments m = monte_carlo(10000, [&](int s) { return x0[s]; });
        CHECK(std::abs(c0.mean - 1.0) < 3.0 * c0.se);
        CHECK(std::abs(c1.mean - std::exp(-0.5)) < 3.0 * c1.se);
        CHECK(std::abs(m.mean) < 3.0 * m.se);
    }

    TEST_CASE("circulant diagnostics and rejection of non-positive-definite tables") {
        const Grid1D grid = Grid1D::with_spacing(-10.0, 10.0, 0.1);
        CirculantDiagnostics diag;
        sample_gaussian_circulant(GaussianField{1.0, GaussianKernel{1.0, 1.0}}, grid, 1, &diag);
        CHECK(diag.embedding_size >= 2 * grid.size() - 2);
        CHECK(diag.clipped_mass <= 0.01 * diag.total_mass);

        const GaussianField boxcar{1.0, TabulatedCovariance{{0.0, 2.0, 2.05}, {1.0, 1.0, 0.0}}};
        CHECK_THROWS_AS(sample_gaussian_circulant(boxcar, grid, 1), ValidationError);
        CHECK_THROWS_AS(sample_field(boxcar, grid, 1), ValidationError);
        const GaussianField tent{1.0, TabulatedCovariance{{0.0, 1.0}, {1.0, 0.0}}};
        CHECK_NOTHROW(sample_field(tent, grid, 1));
    }

    TEST_CASE("Mercer eigenpairs") {
        const Grid1D interval = Grid1D::with_spacing(-3.0, 3.0, 0.1);
        const CovarianceModel cov = GaussianKernel{1.0, 1.0};
        const std::size_t n = interval.size();
        const MercerBasis full = mercer_eigenpairs(cov, interval, n);
        REQUIRE(full.eigenvalues.size() == n);
        for (std::size_t j = 0; j < n; ++j) CHECK(full.eigenvalues[j] >= -1e-10);
        for (std::size_t j = 1; j < n; ++j) CHECK(full.eigenvalues[j] <= full.eigenvalues[j - 1]);

        double worst = 0.0;
        for (std::size_t a = 0; a < n; a += 7) {
            for (std::size_t b = 0; b < n; b += 5) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += full.eigenvalues[j] * full.modes[j][a] * full.modes[j][b];
                worst = std::max(worst, std::abs(s - covariance_at(cov, interval.x(a) - interval.x(b))));
            }
        }
        CHECK(worst < 1e-8);

        double gram = 0.0;
        for (std::size_t i = 0; i < n; ++i) gram += interval.spacing() * full.modes[0][i] * full.modes[1][i];
        CHECK(std::abs(gram) < 1e-10);

        double trace = 0.0;
        for (double c : full.eigenvalues) trace += c;
        CHECK(trace == doctest::Approx(interval.spacing() * static_cast<double>(n)).epsilon(1e-10));
        CHECK(std::abs(trace - 6.0) <= interval.spacing() + 1e-10);

        CHECK_THROWS_AS(mercer_eigenpairs(cov, interval, 0), ValidationError);
        CHECK_THROWS_AS(mercer_eigenpairs(cov, interval, n + 1), ValidationError);
    }

    TEST_CASE("KL coefficient variances match the Mercer eigenvalues") {
        const Grid1D interval = Grid1D::with_spacing(-4.0, 4.0, 0.1);
        const MercerBasis basis = mercer_eigenpairs(GaussianKernel{1.0, 1.0}, interval, 3);
        const int n = 10000;
        for (std::size_t j = 0; j < 3; ++j) {
            const Moments m = monte_carlo(n, [&](int s) {
                const double g = sample_kl_coefficients(basis, static_cast<std::uint64_t>(s))[j];
                return g * g;
            });
            CHECK(std::abs(m.mean - basis.eigenvalues[j]) < 3.0 * m.se);
        }
    }

    TEST_CASE("Poisson field mean identity") {
        const PoissonField spec{1.0, BumpProfile{1.0, 0.5}};
        const Grid1D grid = Grid1D::with_spacing(-2.0, 2.0, 0.01);
        const std::size_t i0 = grid.aligned_index(0.0);
        const Moments m = monte_carlo(2000, [&](int s) {
            return sample_field(spec, grid, static_cast<std::uint64_t>(s)).values[i0];
        });
        CHECK(spec_mean(spec) == doctest::Approx(1.0));
        CHECK(std::abs(m.mean - 1.0) < 3.0 * m.se);
    }

    TEST_CASE("Poisson count law") {
        const double lambda = 3.0;
        const int n = 10000;
        std::vector<double> obs(40, 0.0);
        for (int s = 0; s < n; ++s) {
            const auto pts = sample_poisson_points(1.5, -1.0, 1.0, static_cast<std::uint64_t>(s));
            for (std::size_t i = 1; i < pts.size(); ++i) REQUIRE(pts[i] >= pts[i - 1]);
            for (double p : pts) REQUIRE((p >= -1.0 && p <= 1.0));
            obs[std::min<std::size_t>(pts.size(), obs.size() - 1)] += 1.0;
        }
        double chi2 = 0.0, tail_o = 0.0, tail_e = n;
        int cells = 0;
        double p = std::exp(-lambda);
        for (std::size_t c = 0; c < 9; ++c) {
            chi2 += (obs[c] - n * p) * (obs[c] - n * p) / (n * p);
            tail_e -= n * p;
            ++cells;
            p *= lambda / static_cast<double>(c + 1);
        }
        for (std::size_t c = 9; c < obs.size(); ++c) tail_o += obs[c];
        chi2 += (tail_o - tail_e) * (tail_o - tail_e) / tail_e;
        ++cells;
        const double crit = boost::math::quantile(boost::math::chi_squared(cells - 1), 0.99);
        CHECK(chi2 < crit);
    }

    TEST_CASE("lattice field uses one weight per site") {
        const Grid1D grid = Grid1D::with_spacing(-5.0, 5.0, 0.1);
        const LatticeField spec{DiscreteDistribution{{1.0, 3.0}, {1.0, 1.0}}, BumpProfile{1.0, 0.3}};
        const auto f = sample_field(spec, grid, 4);
        for (int j = -4; j <= 4; ++j) {
            const double v = f.values[grid.aligned_index(j)];
            CHECK((v == 1.0 || v == 3.0));
            CHECK(f.values[grid.aligned_index(j + 0.2)] == v);
            CHECK(f.values[grid.aligned_index(j + 0.5)] == 0.0);
        }
        CHECK(spec_mean(spec) == doctest::Approx(2.0 * 0.6));
    }

    TEST_CASE("Gaussian KL and circulant samplers agree") {
        const GaussianField g{1.0, GaussianKernel{1.0, 1.0}};
        const Grid1D grid = Grid1D::with_spacing(-5.0, 5.0, 0.05);
        const MercerBasis basis = mercer_eigenpairs(g.covariance, grid, grid.size());
        const std::size_t i0 = grid.aligned_index(0.0);
        const int n = 10000;
        for (double lag : {0.0, 0.5, 1.0, 1.5, 2.0}) {
            const std::size_t il = grid.aligned_index(lag);
            const Moments c = monte_carlo(n, [&](int s) {
                const auto f = sample_gaussian_circulant(g, grid, static_cast<std::uint64_t>(s));
                return (f.values[i0] - 1.0) * (f.values[il] - 1.0);
            });
            const Moments k = monte_carlo(n, [&](int s) {
                const auto f = sample_gaussian_kl(g, grid, basis, static_cast<std::uint64_t>(s));
                return (f.values[i0] - 1.0) * (f.values[il] - 1.0);
            });
            CHECK(std::abs(c.mean - k.mean) < 3.0 * std::hypot(c.se, k.se));
        }
    }
}
