#include <fftw3.h>
#include <spdlog/spdlog.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <random>
#include <sstream>

#include "umf/error.hpp"
#include "umf/field.hpp"
#include "umf/rng.hpp"

namespace umf {
namespace {

constexpr std::uint64_t kStreamCirculant = 0;
constexpr std::uint64_t kStreamKarhunenLoeve = 1;
constexpr std::uint64_t kStreamPoisson = 2;
constexpr std::uint64_t kStreamLattice = 3;

constexpr double kMaxClippedFraction = 0.01;

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

class FftwBuffer {
public:
    explicit FftwBuffer(std::size_t n) : n_(n), data_(fftw_alloc_complex(n)) {
        if (!data_) throw NumericalError("fftw: allocation failed");
    }
    ~FftwBuffer() { fftw_free(data_); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;

    fftw_complex* data() { return data_; }
    std::size_t size() const { return n_; }

    // in-place forward DFT
    void forward() {
        fftw_plan plan;
        {
            std::lock_guard lock(fftw_plan_mutex());
            plan = fftw_plan_dft_1d(static_cast<int>(n_), data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
        }
        fftw_execute(plan);
        std::lock_guard lock(fftw_plan_mutex());
        fftw_destroy_plan(plan);
    }

private:
    std::size_t n_;
    fftw_complex* data_;
};

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::uint64_t require_seed(std::optional<std::uint64_t> seed, const FieldSpec& spec) {
    if (!seed) throw ValidationError("sample_field: a seed is required for random spec '" + spec_kind(spec) + "'");
    return *seed;
}

}  // namespace

FieldRealization sample_gaussian_circulant(const GaussianField& spec, const Grid1D& grid, std::uint64_t seed,
                                           CirculantDiagnostics* diagnostics) {
    validate(spec.covariance);
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    FieldRealization out{grid, std::vector<double>(n, spec.mu), "gaussian", seed};
    if (covariance_variance(spec.covariance) == 0.0) {
        if (diagnostics) *diagnostics = {};
        return out;
    }

    // Embedding period M h must cover the window twice and the kernel range.
    const double needed = std::max(grid.length(), covariance_range(spec.covariance));
    const auto half = static_cast<std::size_t>(std::ceil(needed / h)) + 1;
    const std::size_t m = next_pow2(2 * std::max(half, n - 1));

    FftwBuffer row(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t lag = std::min(j, m - j);
        row.data()[j][0] = covariance_at(spec.covariance, static_cast<double>(lag) * h);
        row.data()[j][1] = 0.0;
    }
    row.forward();

    std::vector<double> lambda(m);
    double positive = 0.0, negative = 0.0;
    std::size_t clipped = 0;
    for (std::size_t j = 0; j < m; ++j) {
        const double l = row.data()[j][0];
        if (l < 0.0) {
            negative -= l;
            ++clipped;
            lambda[j] = 0.0;
        } else {
            positive += l;
            lambda[j] = l;
        }
    }
    if (diagnostics) *diagnostics = {m, negative, positive, clipped};
    if (negative > kMaxClippedFraction * positive) {
        std::ostringstream msg;
        msg << "circulant embedding: clipped spectral mass " << negative << " exceeds 1% of total " << positive
            << " (embedding size " << m << "); covariance is not positive definite on this grid";
        throw ValidationError(msg.str());
    }
    if (clipped > 0 && negative > 1e-12 * positive) {
        spdlog::warn("circulant embedding: clipped {} negative eigenvalues (mass fraction {:.3e})", clipped,
                     negative / positive);
    }

    Philox4x32 gen(seed, kStreamCirculant);
    FftwBuffer work(m);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double s = std::sqrt(lambda[j] * scale);
        work.data()[j][0] = s * standard_normal(gen);
        work.data()[j][1] = s * standard_normal(gen);
    }
    work.forward();
    for (std::size_t i = 0; i < n; ++i) out.values[i] = spec.mu + work.data()[i][0];
    return out;
}

MercerBasis mercer_eigenpairs(const CovarianceModel& cov, const Grid1D& interval, std::size_t m) {
    validate(cov);
    const std::size_t n = interval.size();
    if (m < 1 || m > n) throw ValidationError("mercer_eigenpairs: need 1 <= m <= number of interval points");
    const double h = interval.spacing();
    Eigen::MatrixXd kernel(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = h * covariance_at(cov, interval.x(i) - interval.x(j));
            kernel(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            kernel(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel);
    if (solver.info() != Eigen::Success) throw NumericalError("mercer_eigenpairs: eigensolver failed");

    MercerBasis basis{interval, {}, {}};
    basis.eigenvalues.reserve(m);
    basis.modes.reserve(m);
    const double norm = 1.0 / std::sqrt(h);
    // Eigen sorts ascending; walk from the top.
    for (std::size_t r = 0; r < m; ++r) {
        const auto col = static_cast<Eigen::Index>(n - 1 - r);
        basis.eigenvalues.push_back(solver.eigenvalues()(col));
        std::vector<double> mode(n);
        for (std::size_t i = 0; i < n; ++i) mode[i] = norm * solver.eigenvectors()(static_cast<Eigen::Index>(i), col);
        basis.modes.push_back(std::move(mode));
    }
    return basis;
}

std::vector<double> sample_kl_coefficients(const MercerBasis& basis, std::uint64_t seed) {
    Philox4x32 gen(seed, kStreamKarhunenLoeve);
    std::vector<double> gamma(basis.eigenvalues.size());
    for (std::size_t j = 0; j < gamma.size(); ++j) {
        gamma[j] = std::sqrt(std::max(basis.eigenvalues[j], 0.0)) * standard_normal(gen);
    }
    return gamma;
}

FieldRealization sample_gaussian_kl(const GaussianField& spec, const Grid1D& grid, double half_length, std::size_t m,
                                    std::uint64_t seed) {
    FieldRealization out{grid, std::vector<double>(grid.size(), spec.mu), "gaussian", seed};
    if (m == 0) return out;
    if (!(half_length > 0.0)) throw ValidationError("sample_gaussian_kl: half_length must be > 0");
    const double h = grid.spacing();
    std::size_t first = grid.size(), last = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(grid.x(i)) <= half_length + 1e-9 * h) {
            first = std::min(first, i);
            last = i;
        }
    }
    if (first >= last) throw ValidationError("sample_gaussian_kl: interval holds fewer than two grid points");
    const std::size_t count = last - first + 1;
    const Grid1D interval(grid.x(first), grid.x(last), count);
    return sample_gaussian_kl(spec, grid, mercer_eigenpairs(spec.covariance, interval, m), seed);
}

FieldRealization sample_gaussian_kl(const GaussianField& spec, const Grid1D& grid, const MercerBasis& basis,
                                    std::uint64_t seed) {
    if (std::abs(basis.grid.spacing() - grid.spacing()) > 1e-12 * grid.spacing())
        throw ValidationError("sample_gaussian_kl: basis spacing differs from the grid spacing");
    const std::size_t first = grid.aligned_index(basis.grid.x_min());
    const std::size_t count = basis.grid.size();
    if (first + count > grid.size()) throw ValidationError("sample_gaussian_kl: basis interval leaves the grid");
    FieldRealization out{grid, std::vector<double>(grid.size(), spec.mu), "gaussian", seed};
    const std::vector<double> gamma = sample_kl_coefficients(basis, seed);
    for (std::size_t j = 0; j < gamma.size(); ++j) {
        for (std::size_t i = 0; i < count; ++i) out.values[first + i] += gamma[j] * basis.modes[j][i];
    }
    return out;
}

std::vector<double> sample_poisson_points(double rho, double lo, double hi, std::uint64_t seed) {
    if (!(rho > 0.0)) throw ValidationError("poisson: intensity rho must be > 0");
    if (!(hi > lo)) throw ValidationError("poisson: empty window");
    Philox4x32 gen(seed, kStreamPoisson);
    std::poisson_distribution<long> count_dist(rho * (hi - lo));
    const long count = count_dist(gen);
    std::vector<double> pts(static_cast<std::size_t>(count));
    for (auto& p : pts) p = lo + (hi - lo) * uniform01(gen);
    std::sort(pts.begin(), pts.end());
    return pts;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Lattice weight g_j depends only on (seed, j): the draw for site j is the
// Philox block at position j of the lattice stream.
double lattice_weight(const DistributionModel& dist, std::uint64_t seed, long site) {
    Philox4x32 gen(seed, kStreamLattice, static_cast<std::uint64_t>(site) * 4);
    return std::visit(overloaded{
                          [&](const NormalDistribution& d) { return d.mean + d.stddev * standard_normal(gen); },
                          [&](const UniformDistribution& d) { return d.lo + (d.hi - d.lo) * uniform01(gen); },
                          [&](const DiscreteDistribution& d) {
                              double total = 0.0;
                              for (double w : d.weights) total += w;
                              const double u = uniform01(gen) * total;
                              double acc = 0.0;
                              for (std::size_t i = 0; i < d.values.size(); ++i) {
                                  acc += d.weights[i];
                                  if (u < acc) return d.values[i];
                              }
                              return d.values.back();
                          },
                      },
                      dist);
}

FieldRealization sample_gaussian(const GaussianField& g, const Grid1D& grid, std::uint64_t seed) {
    if (g.sampler == GaussianSampler::circulant) return sample_gaussian_circulant(g, grid, seed);
    const double half = g.kl_half_length > 0.0 ? g.kl_half_length : std::max(-grid.x_min(), grid.x_max());
    std::size_t inside = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) inside += std::abs(grid.x(i)) <= half + 1e-9 * grid.spacing();
    const std::size_t modes = g.kl_modes > 0 ? std::min(g.kl_modes, inside) : inside;
    return sample_gaussian_kl(g, grid, half, modes, seed);
}

}  // namespace

FieldRealization sample_field(const FieldSpec& spec, const Grid1D& grid, std::optional<std::uint64_t> seed) {
    validate(spec);
    const std::size_t n = grid.size();
    FieldRealization out{grid, std::vector<double>(n, 0.0), spec_kind(spec), std::nullopt};

    std::visit(
        overloaded{
            [&](const ConstantField& c) { std::fill(out.values.begin(), out.values.end(), c.b0); },
            [&](const StepField& s) {
                for (std::size_t i = 0; i < n; ++i) out.values[i] = grid.x(i) < 0.0 ? s.b_left : s.b_right;
            },
            [&](const TanhField& t) {
                for (std::size_t i = 0; i < n; ++i) {
                    const double w = 0.5 * (1.0 + std::tanh(grid.x(i) / t.width));
                    out.values[i] = t.b_minus_inf + (t.b_plus_inf - t.b_minus_inf) * w;
                }
            },
            [&](const GaussianField& g) { out = sample_gaussian(g, grid, require_seed(seed, spec)); },
            [&](const SquaredGaussianField& sg) {
                const std::uint64_t s = require_seed(seed, spec);
                const FieldRealization inner = sample_gaussian(sg.inner, grid, s);
                for (std::size_t i = 0; i < n; ++i) out.values[i] = sg.b_minus + inner.values[i] * inner.values[i];
            },
            [&](const PoissonField& p) {
                const std::uint64_t s = require_seed(seed, spec);
                const double reach = profile_support(p.profile);
                const auto pts = sample_poisson_points(p.rho, grid.x_min() - reach, grid.x_max() + reach, s);
                for (double y : pts) {
                    const std::size_t lo = grid.nearest_index(y - reach);
                    const std::size_t hi = grid.nearest_index(y + reach);
                    for (std::size_t i = lo == 0 ? 0 : lo - 1; i <= std::min(hi + 1, n - 1); ++i) {
                        out.values[i] += profile_at(p.profile, grid.x(i) - y);
                    }
                }
            },
            [&](const LatticeField& l) {
                const std::uint64_t s = require_seed(seed, spec);
                const double reach = profile_support(l.profile);
                const auto j_lo = static_cast<long>(std::floor(grid.x_min() - reach));
                const auto j_hi = static_cast<long>(std::ceil(grid.x_max() + reach));
                for (long j = j_lo; j <= j_hi; ++j) {
                    const double g = lattice_weight(l.distribution, s, j);
                    const auto y = static_cast<double>(j);
                    const std::size_t lo = grid.nearest_index(y - reach);
                    const std::size_t hi = grid.nearest_index(y + reach);
                    for (std::size_t i = lo == 0 ? 0 : lo - 1; i <= std::min(hi + 1, n - 1); ++i) {
                        out.values[i] += g * profile_at(l.profile, grid.x(i) - y);
                    }
                }
            },
        },
        spec);

    out.spec_id = spec_kind(spec);
    if (is_random(spec)) out.seed = seed;
    for (double v : out.values) {
        if (!std::isfinite(v)) throw NumericalError("sample_field: non-finite field value");
    }
    return out;
}

}  // namespace umf
