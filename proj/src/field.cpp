#include "umf/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "umf/error.hpp"

namespace umf {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Linear interpolation through (xs, ys), zero outside [xs.front(), xs.back()].
double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (xs.empty() || x < xs.front() || x > xs.back()) return 0.0;
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) return ys.back();
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    if (j == 0) return ys.front();
    const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

void check_table(const std::vector<double>& xs, const std::vector<double>& ys, const char* what) {
    if (xs.size() < 2 || xs.size() != ys.size()) {
        throw ValidationError(std::string(what) + ": need at least two (x, value) rows of equal length");
    }
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) throw ValidationError(std::string(what) + ": abscissae must increase strictly");
    }
    for (double y : ys) {
        if (!std::isfinite(y)) throw ValidationError(std::string(what) + ": non-finite value");
    }
}

}  // namespace

double covariance_at(const CovarianceModel& cov, double lag) {
    const double s = std::abs(lag);
    return std::visit(overloaded{
                          [s](const GaussianKernel& g) {
                              if (g.variance == 0.0) return 0.0;
                              const double r = s / g.correlation_length;
                              return g.variance * std::exp(-0.5 * r * r);
                          },
                          [s](const ExponentialKernel& e) {
                              if (e.variance == 0.0) return 0.0;
                              return e.variance * std::exp(-s / e.correlation_length);
                          },
                          [s](const TabulatedCovariance& t) { return interpolate(t.lags, t.values, s); },
                      },
                      cov);
}

double covariance_variance(const CovarianceModel& cov) { return covariance_at(cov, 0.0); }

double covariance_range(const CovarianceModel& cov) {
    return std::visit(overloaded{
                          [](const GaussianKernel& g) { return 8.0 * g.correlation_length; },
                          [](const ExponentialKernel& e) { return 40.0 * e.correlation_length; },
                          [](const TabulatedCovariance& t) { return t.lags.back(); },
                      },
                      cov);
}

void validate(const CovarianceModel& cov) {
    std::visit(overloaded{
                   [](const GaussianKernel& g) {
                       if (!(g.variance >= 0.0)) throw ValidationError("gaussian kernel: variance must be >= 0");
                       if (!(g.correlation_length > 0.0))
                           throw ValidationError("gaussian kernel: correlation_length must be > 0");
                   },
                   [](const ExponentialKernel& e) {
                       if (!(e.variance >= 0.0)) throw ValidationError("exponential kernel: variance must be >= 0");
                       if (!(e.correlation_length > 0.0))
                           throw ValidationError("exponential kernel: correlation_length must be > 0");
                   },
                   [](const TabulatedCovariance& t) {
                       check_table(t.lags, t.values, "tabulated covariance");
                       if (t.lags.front() != 0.0) throw ValidationError("tabulated covariance: first lag must be 0");
                       for (double v : t.values) {
                           if (std::abs(v) > t.values.front() * (1.0 + 1e-12)) {
                               throw ValidationError("tabulated covariance: |c(x)| exceeds c(0)");
                           }
                       }
                   },
               },
               cov);
}

double profile_at(const ProfileFunction& u, double x) {
    return std::visit(overloaded{
                          [x](const BumpProfile& b) { return std::abs(x) <= b.half_width ? b.amplitude : 0.0; },
                          [x](const TabulatedProfile& t) { return interpolate(t.offsets, t.values, x); },
                      },
                      u);
}

double profile_integral(const ProfileFunction& u) {
    return std::visit(overloaded{
                          [](const BumpProfile& b) { return 2.0 * b.half_width * b.amplitude; },
                          [](const TabulatedProfile& t) {
                              double s = 0.0;
                              for (std::size_t i = 1; i < t.offsets.size(); ++i)
                                  s += 0.5 * (t.values[i] + t.values[i - 1]) * (t.offsets[i] - t.offsets[i - 1]);
                              return s;
                          },
                      },
                      u);
}

double profile_abs_integral(const ProfileFunction& u) {
    return std::visit(overloaded{
                          [](const BumpProfile& b) { return 2.0 * b.half_width * std::abs(b.amplitude); },
                          [](const TabulatedProfile& t) {
                              double s = 0.0;
                              for (std::size_t i = 1; i < t.offsets.size(); ++i) {
                                  const double y0 = t.values[i - 1], y1 = t.values[i];
                                  const double dx = t.offsets[i] - t.offsets[i - 1];
                                  if (y0 * y1 >= 0.0) {
                                      s += 0.5 * (std::abs(y0) + std::abs(y1)) * dx;
                                  } else {
                                      // sign change inside the segment: two triangles
                                      const double f = std::abs(y0) / (std::abs(y0) + std::abs(y1));
                                      s += 0.5 * std::abs(y0) * f * dx + 0.5 * std::abs(y1) * (1.0 - f) * dx;
                                  }
                              }
                              return s;
                          },
                      },
                      u);
}

double profile_support(const ProfileFunction& u) {
    return std::visit(overloaded{
                          [](const BumpProfile& b) { return b.half_width; },
                          [](const TabulatedProfile& t) {
                              return std::max(std::abs(t.offsets.front()), std::abs(t.offsets.back()));
                          },
                      },
                      u);
}

void validate(const ProfileFunction& u) {
    std::visit(overloaded{
                   [](const BumpProfile& b) {
                       if (!(b.half_width > 0.0)) throw ValidationError("bump profile: half_width must be > 0");
                       if (!std::isfinite(b.amplitude)) throw ValidationError("bump profile: amplitude not finite");
                   },
                   [](const TabulatedProfile& t) { check_table(t.offsets, t.values, "tabulated profile"); },
               },
               u);
}

double distribution_mean(const DistributionModel& d) {
    return std::visit(overloaded{
                          [](const NormalDistribution& n) { return n.mean; },
                          [](const UniformDistribution& u) { return 0.5 * (u.lo + u.hi); },
                          [](const DiscreteDistribution& dd) {
                              double w = 0.0, s = 0.0;
                              for (std::size_t i = 0; i < dd.values.size(); ++i) {
                                  s += dd.weights[i] * dd.values[i];
                                  w += dd.weights[i];
                              }
                              return s / w;
                          },
                      },
                      d);
}

void validate(const DistributionModel& d) {
    std::visit(overloaded{
                   [](const NormalDistribution& n) {
                       if (!(n.stddev >= 0.0)) throw ValidationError("normal distribution: stddev must be >= 0");
                   },
                   [](const UniformDistribution& u) {
                       if (!(u.lo < u.hi)) throw ValidationError("uniform distribution: need lo < hi");
                   },
                   [](const DiscreteDistribution& dd) {
                       if (dd.values.empty() || dd.values.size() != dd.weights.size())
                           throw ValidationError("discrete distribution: values and weights must match");
                       double w = 0.0;
                       for (double x : dd.weights) {
                           if (!(x >= 0.0)) throw ValidationError("discrete distribution: negative weight");
                           w += x;
                       }
                       if (!(w > 0.0)) throw ValidationError("discrete distribution: weights sum to zero");
                   },
               },
               d);
}

bool is_random(const FieldSpec& spec) {
    return !(std::holds_alternative<ConstantField>(spec) || std::holds_alternative<StepField>(spec) ||
             std::holds_alternative<TanhField>(spec));
}

std::string spec_kind(const FieldSpec& spec) {
    return std::visit(overloaded{
                          [](const ConstantField&) { return std::string("constant"); },
                          [](const StepField&) { return std::string("step"); },
                          [](const TanhField&) { return std::string("tanh"); },
                          [](const GaussianField&) { return std::string("gaussian"); },
                          [](const SquaredGaussianField&) { return std::string("squared_gaussian"); },
                          [](const PoissonField&) { return std::string("poisson"); },
                          [](const LatticeField&) { return std::string("lattice_iid"); },
                      },
                      spec);
}

double spec_mean(const FieldSpec& spec) {
    return std::visit(overloaded{
                          [](const ConstantField& c) { return c.b0; },
                          [](const StepField& s) { return 0.5 * (s.b_left + s.b_right); },
                          [](const TanhField& t) { return 0.5 * (t.b_minus_inf + t.b_plus_inf); },
                          [](const GaussianField& g) { return g.mu; },
                          [](const SquaredGaussianField& s) {
                              return s.b_minus + s.inner.mu * s.inner.mu + covariance_variance(s.inner.covariance);
                          },
                          [](const PoissonField& p) { return p.rho * profile_integral(p.profile); },
                          [](const LatticeField& l) {
                              // average over a unit cell of sum_j g_j u(x - j)
                              return distribution_mean(l.distribution) * profile_integral(l.profile);
                          },
                      },
                      spec);
}

void validate(const FieldSpec& spec) {
    std::visit(overloaded{
                   [](const ConstantField& c) {
                       if (!(c.b0 != 0.0) || !std::isfinite(c.b0))
                           throw ValidationError("constant field: b0 must be finite and non-zero");
                   },
                   [](const StepField& s) {
                       if (!std::isfinite(s.b_left) || !std::isfinite(s.b_right))
                           throw ValidationError("step field: values must be finite");
                   },
                   [](const TanhField& t) {
                       if (!(t.width > 0.0)) throw ValidationError("tanh field: width must be > 0");
                       if (!std::isfinite(t.b_minus_inf) || !std::isfinite(t.b_plus_inf))
                           throw ValidationError("tanh field: limits must be finite");
                   },
                   [](const GaussianField& g) {
                       if (!(g.mu != 0.0) || !std::isfinite(g.mu))
                           throw ValidationError("gaussian field: mean mu must be finite and non-zero");
                       validate(g.covariance);
                       if (g.kl_half_length < 0.0) throw ValidationError("gaussian field: kl_half_length < 0");
                   },
                   [](const SquaredGaussianField& s) {
                       if (!(s.b_minus > 0.0)) throw ValidationError("squared-gaussian field: b_minus must be > 0");
                       if (!std::isfinite(s.inner.mu)) throw ValidationError("squared-gaussian field: inner mean not finite");
                       validate(s.inner.covariance);
                       if (s.inner.kl_half_length < 0.0) throw ValidationError("gaussian field: kl_half_length < 0");
                   },
                   [](const PoissonField& p) {
                       if (!(p.rho > 0.0)) throw ValidationError("poisson field: rho must be > 0");
                       validate(p.profile);
                       if (!(profile_integral(p.profile) != 0.0))
                           throw ValidationError("poisson field: rho * int u must be non-zero");
                   },
                   [](const LatticeField& l) {
                       validate(l.distribution);
                       validate(l.profile);
                       if (!(distribution_mean(l.distribution) * profile_integral(l.profile) != 0.0))
                           throw ValidationError("lattice field: mean weight times int u must be non-zero");
                   },
               },
               spec);
}

// ---------------------------------------------------------------------------

VectorPotential vector_potential(const FieldRealization& field) {
    const Grid1D& g = field.grid;
    const std::size_t n = g.size();
    const double h = g.spacing();
    std::vector<double> a(n, 0.0);
    const std::size_t anchor = g.nearest_index(0.0);
    for (std::size_t i = anchor + 1; i < n; ++i) a[i] = a[i - 1] + 0.5 * h * (field.values[i - 1] + field.values[i]);
    for (std::size_t i = anchor; i-- > 0;) a[i] = a[i + 1] - 0.5 * h * (field.values[i] + field.values[i + 1]);
    return {g, std::move(a)};
}

double spatial_mean(const FieldRealization& field) {
    const auto& b = field.values;
    double s = 0.5 * (b.front() + b.back());
    for (std::size_t i = 1; i + 1 < b.size(); ++i) s += b[i];
    return s * field.grid.spacing() / field.grid.length();
}

double growth_rate(const VectorPotential& a, double outer_fraction) {
    const Grid1D& g = a.grid;
    const double reach = std::max(-g.x_min(), g.x_max());
    const double cut = (1.0 - outer_fraction) * reach;
    double rate = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        if (std::abs(x) >= cut && std::abs(x) > 0.0) rate = std::min(rate, std::abs(a.values[i]) / std::abs(x));
    }
    return rate;
}

double field_metric(const FieldRealization& b, const FieldRealization& b2) {
    if (!(b.grid == b2.grid)) throw ValidationError("field_metric: realizations live on different grids");
    const Grid1D& g = b.grid;
    const double h = g.spacing();
    const double per_unit = 1.0 / h;
    if (std::abs(per_unit - std::round(per_unit)) > 1e-9 * per_unit) {
        throw ValidationError("field_metric: grid spacing must divide the unit cell");
    }
    const auto steps = static_cast<std::size_t>(std::round(per_unit));
    const auto j_lo = static_cast<long>(std::ceil(g.x_min() - 1e-9));
    const auto j_hi = static_cast<long>(std::floor(g.x_max() + 1e-9)) - 1;
    double d = 0.0;
    for (long j = j_lo; j <= j_hi; ++j) {
        const std::size_t i0 = g.aligned_index(static_cast<double>(j));
        double integral = 0.0;
        for (std::size_t i = i0; i < i0 + steps; ++i) {
            integral += 0.5 * h * (std::abs(b.values[i] - b2.values[i]) + std::abs(b.values[i + 1] - b2.values[i + 1]));
        }
        d += std::ldexp(std::min(1.0, integral), -static_cast<int>(std::labs(j)));
    }
    return d;
}

double field_metric_tail(const Grid1D& grid) {
    // cells with j < ceil(x_min) or j + 1 > floor(x_max) are dropped
    const long j_lo = static_cast<long>(std::ceil(grid.x_min() - 1e-9));
    const long j_hi = static_cast<long>(std::floor(grid.x_max() + 1e-9)) - 1;
    auto tail = [](long first) { return first <= 0 ? 3.0 : std::ldexp(2.0, -static_cast<int>(first)); };
    // sum_{j >= m} 2^-j = 2^{1-m} for m >= 1
    return tail(j_hi + 1) + tail(-j_lo + 1);
}

FieldRealization restrict_field(const FieldRealization& field, std::size_t first, std::size_t count) {
    if (count < 3 || first + count > field.grid.size()) throw ValidationError("restrict_field: window out of range");
    const Grid1D& g = field.grid;
    Grid1D sub(g.x(first), g.x(first + count - 1), count);
    std::vector<double> vals(field.values.begin() + static_cast<std::ptrdiff_t>(first),
                             field.values.begin() + static_cast<std::ptrdiff_t>(first + count));
    return {sub, std::move(vals), field.spec_id, field.seed};
}

FieldRealization shift_field(const FieldRealization& field, double z) {
    const Grid1D& g = field.grid;
    const double h = g.spacing();
    const double steps_f = z / h;
    if (std::abs(steps_f - std::round(steps_f)) > 1e-9 * std::max(1.0, std::abs(steps_f))) {
        throw ValidationError("shift_field: shift must be a multiple of the grid spacing");
    }
    const long steps = std::lround(steps_f);
    const auto n = static_cast<long>(g.size());
    if (std::labs(steps) >= n - 2) throw ValidationError("shift_field: |z| must be smaller than the window");
    if (steps == 0) return field;
    const std::size_t count = static_cast<std::size_t>(n - std::labs(steps));
    // target window: x in [x_min, x_max - z] for z > 0, [x_min - z, x_max] for z < 0
    const std::size_t target_first = steps > 0 ? 0 : static_cast<std::size_t>(-steps);
    const std::size_t source_first = steps > 0 ? static_cast<std::size_t>(steps) : 0;
    const double lo = g.x(target_first);
    const double hi = g.x(target_first + count - 1);
    if (lo > 0.0 || hi < 0.0) throw ValidationError("shift_field: shrunk window no longer contains x = 0");
    Grid1D sub(lo, hi, count);
    std::vector<double> vals(field.values.begin() + static_cast<std::ptrdiff_t>(source_first),
                             field.values.begin() + static_cast<std::ptrdiff_t>(source_first + count));
    return {sub, std::move(vals), field.spec_id, field.seed};
}

}  // namespace umf
