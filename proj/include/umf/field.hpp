#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "umf/grid.hpp"

namespace umf {

// ---------------------------------------------------------------------------
// Covariance and profile models
// ---------------------------------------------------------------------------

/// c(x) = variance * exp(-x^2 / (2 l^2))
struct GaussianKernel {
    double variance = 1.0;
    double correlation_length = 1.0;
};

/// c(x) = variance * exp(-|x| / l)
struct ExponentialKernel {
    double variance = 1.0;
    double correlation_length = 1.0;
};

/// Piecewise-linear in |lag|, zero beyond the last lag. lags must start at 0
/// and increase strictly.
struct TabulatedCovariance {
    std::vector<double> lags;
    std::vector<double> values;
};

using CovarianceModel = std::variant<GaussianKernel, ExponentialKernel, TabulatedCovariance>;

double covariance_at(const CovarianceModel& cov, double lag);
double covariance_variance(const CovarianceModel& cov);
/// Lag beyond which the kernel is negligible (used to size embeddings).
double covariance_range(const CovarianceModel& cov);
void validate(const CovarianceModel& cov);

/// amplitude on |x| <= half_width, zero elsewhere; integral = 2 amplitude half_width.
struct BumpProfile {
    double amplitude = 1.0;
    double half_width = 0.5;
};

/// Piecewise-linear through (offsets, values), zero outside.
struct TabulatedProfile {
    std::vector<double> offsets;
    std::vector<double> values;
};

using ProfileFunction = std::variant<BumpProfile, TabulatedProfile>;

double profile_at(const ProfileFunction& u, double x);
double profile_integral(const ProfileFunction& u);
double profile_abs_integral(const ProfileFunction& u);
/// Smallest s with u = 0 outside [-s, s].
double profile_support(const ProfileFunction& u);
void validate(const ProfileFunction& u);

// Single-site distributions for the lattice field.
struct NormalDistribution {
    double mean = 1.0;
    double stddev = 1.0;
};
struct UniformDistribution {
    double lo = 0.0;
    double hi = 2.0;
};
struct DiscreteDistribution {
    std::vector<double> values;
    std::vector<double> weights;
};

using DistributionModel = std::variant<NormalDistribution, UniformDistribution, DiscreteDistribution>;

double distribution_mean(const DistributionModel& d);
void validate(const DistributionModel& d);

// ---------------------------------------------------------------------------
// Field specifications
// ---------------------------------------------------------------------------

struct ConstantField {
    double b0 = 1.0;
};

/// b_left for x < 0, b_right for x >= 0.
struct StepField {
    double b_left = -1.0;
    double b_right = 1.0;
};

/// Smooth interpolation between b_minus_inf and b_plus_inf over `width`.
struct TanhField {
    double b_minus_inf = 1.0;
    double b_plus_inf = 3.0;
    double width = 2.0;
};

enum class GaussianSampler { circulant, karhunen_loeve };

struct GaussianField {
    double mu = 1.0;
    CovarianceModel covariance = GaussianKernel{};
    GaussianSampler sampler = GaussianSampler::circulant;
    double kl_half_length = 0.0;  ///< used by the KL sampler; 0 = whole grid
    std::size_t kl_modes = 0;     ///< used by the KL sampler; 0 = all modes
};

/// b = b_minus + g^2 with g drawn from `inner`.
struct SquaredGaussianField {
    double b_minus = 1.0;
    GaussianField inner;
};

/// b(x) = sum over Poisson points y of u(x - y).
struct PoissonField {
    double rho = 1.0;
    ProfileFunction profile = BumpProfile{};
};

/// b(x) = sum_j g_j u(x - j) over integer sites j with iid weights g_j.
struct LatticeField {
    DistributionModel distribution = NormalDistribution{};
    ProfileFunction profile = BumpProfile{};
};

using FieldSpec = std::variant<ConstantField, StepField, TanhField, GaussianField, SquaredGaussianField,
                               PoissonField, LatticeField>;

bool is_random(const FieldSpec& spec);
std::string spec_kind(const FieldSpec& spec);
/// Expected value of b(0) (the spatial mean for ergodic specs).
double spec_mean(const FieldSpec& spec);
void validate(const FieldSpec& spec);

// ---------------------------------------------------------------------------
// Realizations
// ---------------------------------------------------------------------------

struct FieldRealization {
    Grid1D grid;
    std::vector<double> values;
    std::string spec_id;
    std::optional<std::uint64_t> seed;
};

struct VectorPotential {
    Grid1D grid;
    std::vector<double> values;
};

/// Draws (or evaluates, for deterministic specs) a field on the grid. Random
/// specs require a seed. Pure: equal inputs give bit-identical output.
FieldRealization sample_field(const FieldSpec& spec, const Grid1D& grid, std::optional<std::uint64_t> seed = {});

struct CirculantDiagnostics {
    std::size_t embedding_size = 0;
    double clipped_mass = 0.0;  ///< sum of |negative eigenvalues|
    double total_mass = 0.0;    ///< sum of positive eigenvalues
    std::size_t clipped_count = 0;
};

/// Stationary Gaussian sample by circulant embedding. Negative embedding
/// eigenvalues are clipped to zero (with a warning) as long as their mass
/// stays below 1% of the total; beyond that a ValidationError is thrown.
FieldRealization sample_gaussian_circulant(const GaussianField& spec, const Grid1D& grid, std::uint64_t seed,
                                           CirculantDiagnostics* diagnostics = nullptr);

/// Eigenpairs of the discretized covariance operator on a grid window.
struct MercerBasis {
    Grid1D grid;                              ///< the interval grid
    std::vector<double> eigenvalues;          ///< descending
    std::vector<std::vector<double>> modes;   ///< h-orthonormal grid functions
};

/// The m largest eigenpairs of h [c(x_i - x_j)] on `interval`.
MercerBasis mercer_eigenpairs(const CovarianceModel& cov, const Grid1D& interval, std::size_t m);

/// Independent KL coefficients gamma_j with variance max(c_j, 0).
std::vector<double> sample_kl_coefficients(const MercerBasis& basis, std::uint64_t seed);

/// KL sample mu + sum_j gamma_j phi_j on the grid points with |x| <= half_length;
/// the remaining points are set to mu.
FieldRealization sample_gaussian_kl(const GaussianField& spec, const Grid1D& grid, double half_length, std::size_t m,
                                    std::uint64_t seed);
/// Same, reusing a precomputed basis whose interval lies on the grid.
FieldRealization sample_gaussian_kl(const GaussianField& spec, const Grid1D& grid, const MercerBasis& basis,
                                    std::uint64_t seed);

/// Poisson points on [lo, hi] with intensity rho, sorted.
std::vector<double> sample_poisson_points(double rho, double lo, double hi, std::uint64_t seed);

/// Cumulative trapezoidal integral with a = 0 at the grid point nearest 0.
VectorPotential vector_potential(const FieldRealization& field);

/// Trapezoid average of b over the box.
double spatial_mean(const FieldRealization& field);

/// Estimate of liminf |a(x)|/|x|: the minimum of |a|/|x| over the outer
/// `outer_fraction` of the box on either side.
double growth_rate(const VectorPotential& a, double outer_fraction = 0.25);

/// Locality metric: sum over unit cells [j, j+1] inside the box of
/// 2^-|j| min{1, int_j^{j+1} |b - b2|}. Cells outside contribute 0.
double field_metric(const FieldRealization& b, const FieldRealization& b2);

/// Upper bound on the part of the metric sum dropped by the box truncation.
double field_metric_tail(const Grid1D& grid);

/// (theta_z b)(x) = b(x + z) on the shrunk window where both sides are known.
FieldRealization shift_field(const FieldRealization& field, double z);

/// The part of `field` on grid indices [first, first + count).
FieldRealization restrict_field(const FieldRealization& field, std::size_t first, std::size_t count);

}  // namespace umf
