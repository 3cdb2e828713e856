#include "umf/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "umf/error.hpp"
#include "umf/parallel.hpp"

namespace umf {

namespace {

using cd = std::complex<double>;

double gram_quadratic(const PacketBasis& basis, const std::vector<Eigen::MatrixXd>& gram,
                      const Eigen::MatrixXcd& c) {
    double sum = 0.0;
    for (std::size_t j = 0; j < basis.k_points(); ++j) {
        const Eigen::VectorXcd col = c.col(static_cast<Eigen::Index>(j));
        sum += std::real(col.dot(gram[j].cast<cd>() * col));
    }
    return sum * basis.dk();
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& phi, const Eigen::VectorXd& weight, double h) {
    return h * phi.transpose() * weight.asDiagonal() * phi;
}

void require_packet(const FiberedWavePacket& p) {
    if (!p.basis) throw ValidationError("wave packet has no basis");
    if (p.coefficients.rows() != static_cast<Eigen::Index>(p.basis->bands()) ||
        p.coefficients.cols() != static_cast<Eigen::Index>(p.basis->k_points()))
        throw ValidationError("wave packet coefficients do not match its basis");
}

}  // namespace

Eigen::MatrixXd PacketBasis::states(std::size_t j) const {
    const auto& fiber = sweep.fibers.at(j);
    Eigen::MatrixXd phi(fiber.grid.size(), fiber.bands());
    for (std::size_t n = 0; n < fiber.bands(); ++n)
        for (std::size_t i = 0; i < fiber.grid.size(); ++i) phi(i, n) = fiber.eigenvectors[n][i];
    return phi;
}

VelocityOperatorData velocity_operator_data(const FiberSweep& sweep, std::size_t threads) {
    const std::size_t nk = sweep.kgrid.size();
    VelocityOperatorData out;
    out.velocities.resize(nk);
    out.band_matrix.resize(nk);
    const Grid1D& grid = sweep.potential.grid;
    parallel_for(nk, threads, [&](std::size_t j) {
        const auto& fiber = sweep.fibers[j];
        Eigen::MatrixXd phi(grid.size(), fiber.bands());
        for (std::size_t n = 0; n < fiber.bands(); ++n)
            for (std::size_t i = 0; i < grid.size(); ++i) phi(i, n) = fiber.eigenvectors[n][i];
        Eigen::VectorXd w(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) w(i) = fiber.k - sweep.potential.values[i];
        out.band_matrix[j] = weighted_gram(phi, w, grid.spacing());
        out.velocities[j] = Eigen::Map<const Eigen::VectorXd>(sweep.velocities[j].data(),
                                                              static_cast<Eigen::Index>(fiber.bands()));
    });
    return out;
}

std::shared_ptr<const PacketBasis> make_packet_basis(FiberSweep sweep, std::size_t threads) {
    if (sweep.fibers.size() != sweep.kgrid.size() || sweep.fibers.empty())
        throw ValidationError("fiber sweep is empty or inconsistent with its k-grid");
    const Grid1D& grid = sweep.potential.grid;
    const double h = grid.spacing();
    for (std::size_t j = 1; j < sweep.fibers.size(); ++j) {
        auto& prev = sweep.fibers[j - 1].eigenvectors;
        auto& cur = sweep.fibers[j].eigenvectors;
        for (std::size_t n = 0; n < cur.size(); ++n) {
            double overlap = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) overlap += prev[n][i] * cur[n][i];
            if (overlap * h < 0.0)
                for (double& v : cur[n]) v = -v;
        }
    }

    auto basis = std::make_shared<PacketBasis>();
    basis->sweep = std::move(sweep);
    basis->velocity = velocity_operator_data(basis->sweep, threads);
    const std::size_t nk = basis->k_points();
    basis->q1_squared.resize(nk);
    basis->a_squared.resize(nk);
    Eigen::VectorXd x2(grid.size()), a2(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        x2(i) = grid.x(i) * grid.x(i);
        a2(i) = basis->sweep.potential.values[i] * basis->sweep.potential.values[i];
    }
    parallel_for(nk, threads, [&](std::size_t j) {
        const Eigen::MatrixXd phi = basis->states(j);
        basis->q1_squared[j] = weighted_gram(phi, x2, h);
        basis->a_squared[j] = weighted_gram(phi, a2, h);
    });
    return basis;
}

FiberedWavePacket prepare_packet(std::shared_ptr<const PacketBasis> basis, const PacketSpec& spec) {
    if (!basis) throw ValidationError("packet basis is null");
    if (!(spec.k_width > 0.0) || !std::isfinite(spec.k_width)) throw ValidationError("k_width must be positive");
    if (!std::isfinite(spec.k_center) || !std::isfinite(spec.x2_center))
        throw ValidationError("packet centre must be finite");
    if (spec.profile == PacketProfile::gaussian && !(spec.x1_width > 0.0))
        throw ValidationError("x1_width must be positive");
    if (!(spec.min_capture >= 0.0 && spec.min_capture <= 1.0))
        throw ValidationError("min_capture must lie in [0, 1]");

    const std::size_t nk = basis->k_points();
    const std::size_t nb = basis->bands();
    const Grid1D& grid = basis->sweep.potential.grid;
    const double h = grid.spacing();
    const double s = spec.k_width;
    const double g0 = std::pow(2.0 * std::numbers::pi * s * s, -0.25);

    Eigen::VectorXd overlaps = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nb));
    FiberedWavePacket p;
    p.basis = basis;
    p.coefficients = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nk));

    Eigen::VectorXd chi;
    if (spec.profile == PacketProfile::gaussian) {
        chi.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double u = (grid.x(i) - spec.x1_center) / spec.x1_width;
            chi(i) = std::exp(-0.25 * u * u);
        }
        chi(0) = 0.0;
        chi(chi.size() - 1) = 0.0;
        const double nrm = std::sqrt(h * chi.squaredNorm());
        if (!(nrm > 0.0)) throw ValidationError("x1 profile vanishes on the grid");
        chi /= nrm;
    }

    double column_max = 0.0;
    for (std::size_t j = 0; j < nk; ++j) {
        const double k = basis->sweep.kgrid.k(j);
        const double d = k - spec.k_center;
        const cd g = g0 * std::exp(-d * d / (4.0 * s * s)) * std::exp(cd(0.0, -k * spec.x2_center));
        if (spec.profile == PacketProfile::ground_state) {
            p.coefficients(0, static_cast<Eigen::Index>(j)) = g;
        } else {
            const Eigen::VectorXd proj = h * basis->states(j).transpose() * chi;
            p.coefficients.col(static_cast<Eigen::Index>(j)) = g * proj.cast<cd>();
        }
        column_max = std::max(column_max, p.coefficients.col(static_cast<Eigen::Index>(j)).norm());
    }
    if (!(column_max > 0.0)) throw ValidationError("packet has no weight on the k-window");
    const double edge = std::max(p.coefficients.col(0).norm(),
                                 p.coefficients.col(static_cast<Eigen::Index>(nk - 1)).norm());
    if (edge >= 1e-6 * column_max)
        throw ValidationError("packet does not decay at the k-window edges (edge/peak = " +
                              std::to_string(edge / column_max) + ")");

    const double retained = basis->dk() * p.coefficients.squaredNorm();
    p.capture = std::min(1.0, retained);
    if (p.capture < spec.min_capture)
        throw ValidationError("packet capture " + std::to_string(p.capture) + " below required " +
                              std::to_string(spec.min_capture) + "; raise n_max or widen the k-window");
    p.coefficients /= std::sqrt(retained);
    return p;
}

FiberedWavePacket evolve(const FiberedWavePacket& packet, double t) {
    require_packet(packet);
    if (!std::isfinite(t)) throw ValidationError("time must be finite");
    FiberedWavePacket out = packet;
    const auto& fibers = packet.basis->sweep.fibers;
    for (std::size_t j = 0; j < fibers.size(); ++j)
        for (std::size_t n = 0; n < fibers[j].bands(); ++n)
            out.coefficients(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)) *=
                std::exp(cd(0.0, -t * fibers[j].eigenvalues[n]));
    out.time = packet.time + t;
    return out;
}

double norm(const FiberedWavePacket& packet) {
    require_packet(packet);
    return std::sqrt(packet.basis->dk() * packet.coefficients.squaredNorm());
}

double energy(const FiberedWavePacket& packet) {
    require_packet(packet);
    const auto& fibers = packet.basis->sweep.fibers;
    double sum = 0.0;
    for (std::size_t j = 0; j < fibers.size(); ++j)
        for (std::size_t n = 0; n < fibers[j].bands(); ++n)
            sum += fibers[j].eigenvalues[n] *
                   std::norm(packet.coefficients(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)));
    return sum * packet.basis->dk();
}

double q1_moment(const FiberedWavePacket& packet) {
    require_packet(packet);
    return std::sqrt(std::max(0.0, gram_quadratic(*packet.basis, packet.basis->q1_squared, packet.coefficients)));
}

double a_moment(const FiberedWavePacket& packet) {
    require_packet(packet);
    return std::sqrt(std::max(0.0, gram_quadratic(*packet.basis, packet.basis->a_squared, packet.coefficients)));
}

FiberedWavePacket asymptotic_velocity_apply(const FiberedWavePacket& packet) {
    require_packet(packet);
    FiberedWavePacket out = packet;
    const auto& v = packet.basis->velocity.velocities;
    for (std::size_t j = 0; j < v.size(); ++j)
        out.coefficients.col(static_cast<Eigen::Index>(j)) =
            v[j].cast<cd>().cwiseProduct(packet.coefficients.col(static_cast<Eigen::Index>(j)));
    return out;
}

std::complex<double> averaged_phase(double delta, double t) {
    const double x = t * delta;
    if (std::abs(x) < 1e-6) return {1.0 - x * x / 6.0, x / 2.0};
    return (std::exp(cd(0.0, x)) - 1.0) / cd(0.0, x);
}

FiberedWavePacket apply_band_kernel(const FiberedWavePacket& packet,
                                    const std::function<std::complex<double>(double)>& kernel) {
    require_packet(packet);
    FiberedWavePacket out = packet;
    const auto& fibers = packet.basis->sweep.fibers;
    const auto& m = packet.basis->velocity.band_matrix;
    const auto nb = static_cast<Eigen::Index>(packet.basis->bands());
    Eigen::MatrixXcd weighted(nb, nb);
    for (std::size_t j = 0; j < fibers.size(); ++j) {
        const auto& e = fibers[j].eigenvalues;
        for (Eigen::Index n = 0; n < nb; ++n)
            for (Eigen::Index l = 0; l < nb; ++l)
                weighted(n, l) = m[j](n, l) * kernel(e[static_cast<std::size_t>(n)] - e[static_cast<std::size_t>(l)]);
        out.coefficients.col(static_cast<Eigen::Index>(j)) =
            weighted * packet.coefficients.col(static_cast<Eigen::Index>(j));
    }
    return out;
}

FiberedWavePacket time_averaged_velocity_apply(const FiberedWavePacket& packet0, double t) {
    if (t == 0.0 || !std::isfinite(t)) throw ValidationError("time average needs a finite t != 0");
    return apply_band_kernel(packet0, [t](double d) { return averaged_phase(d, t); });
}

Eigen::MatrixXcd q2_apply(const FiberedWavePacket& packet) {
    require_packet(packet);
    const PacketBasis& basis = *packet.basis;
    const std::size_t nk = basis.k_points();
    if (nk < 5) throw ValidationError("Q2 needs at least five k points");
    const Grid1D& grid = basis.sweep.potential.grid;
    Eigen::MatrixXcd psi(grid.size(), nk);
    for (std::size_t j = 0; j < nk; ++j)
        psi.col(static_cast<Eigen::Index>(j)) =
            basis.states(j).cast<cd>() * packet.coefficients.col(static_cast<Eigen::Index>(j));
    const double dk = basis.dk();
    const auto last = static_cast<Eigen::Index>(nk - 1);
    Eigen::MatrixXcd d(grid.size(), nk);
    d.col(0) = (-3.0 * psi.col(0) + 4.0 * psi.col(1) - psi.col(2)) / (2.0 * dk);
    d.col(last) = (3.0 * psi.col(last) - 4.0 * psi.col(last - 1) + psi.col(last - 2)) / (2.0 * dk);
    for (Eigen::Index j = 1; j < last; ++j) {
        if (j >= 2 && j + 2 <= last)
            d.col(j) = (psi.col(j - 2) - 8.0 * psi.col(j - 1) + 8.0 * psi.col(j + 1) - psi.col(j + 2)) / (12.0 * dk);
        else
            d.col(j) = (psi.col(j + 1) - psi.col(j - 1)) / (2.0 * dk);
    }
    return cd(0.0, 1.0) * d;
}

ResidualEvaluator::ResidualEvaluator(const FiberedWavePacket& packet0) : packet0_(packet0) {
    const Eigen::MatrixXcd q2 = q2_apply(packet0);
    const PacketBasis& basis = *packet0.basis;
    const double h = basis.sweep.potential.grid.spacing();
    const double dk = basis.dk();
    projected_q2_.resize(static_cast<Eigen::Index>(basis.bands()), static_cast<Eigen::Index>(basis.k_points()));
    cd mean = 0.0;
    for (std::size_t j = 0; j < basis.k_points(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        projected_q2_.col(jj) = h * basis.states(j).transpose().cast<cd>() * q2.col(jj);
        mean += packet0.coefficients.col(jj).dot(projected_q2_.col(jj));
    }
    q2_norm_sq_ = dk * h * q2.squaredNorm();
    q2_mean0_ = std::real(mean) * dk;
}

double ResidualEvaluator::residual(double t) const {
    if (t == 0.0 || !std::isfinite(t)) throw ValidationError("ballistic residual is undefined at t = 0");
    const FiberedWavePacket avg = time_averaged_velocity_apply(packet0_, t);
    const FiberedWavePacket asym = asymptotic_velocity_apply(packet0_);
    const Eigen::MatrixXcd w = avg.coefficients - asym.coefficients;
    const double dk = packet0_.basis->dk();
    cd cross = 0.0;
    for (Eigen::Index j = 0; j < w.cols(); ++j) cross += projected_q2_.col(j).dot(w.col(j));
    const double r2 = q2_norm_sq_ / (t * t) + 2.0 * std::real(cross) * dk / t + dk * w.squaredNorm();
    return std::sqrt(std::max(0.0, r2));
}

double ResidualEvaluator::q2_mean(double t) const {
    if (t == 0.0) return q2_mean0_;
    const FiberedWavePacket avg = time_averaged_velocity_apply(packet0_, t);
    cd drift = 0.0;
    for (Eigen::Index j = 0; j < avg.coefficients.cols(); ++j)
        drift += packet0_.coefficients.col(j).dot(avg.coefficients.col(j));
    return q2_mean0_ + t * std::real(drift) * packet0_.basis->dk();
}

double q2_norm(const FiberedWavePacket& packet0) { return ResidualEvaluator(packet0).q2_norm(); }

double q2_mean(const FiberedWavePacket& packet0, double t) { return ResidualEvaluator(packet0).q2_mean(t); }

double ballistic_residual(const FiberedWavePacket& packet0, double t) {
    if (t == 0.0 || !std::isfinite(t)) throw ValidationError("ballistic residual is undefined at t = 0");
    return ResidualEvaluator(packet0).residual(t);
}

LocalizationBound localization_bound(const FiberedWavePacket& packet0, double b_bar) {
    require_packet(packet0);
    const VectorPotential& a = packet0.basis->sweep.potential;
    LocalizationBound out;
    out.b_bar = b_bar > 0.0 ? b_bar : growth_rate(a);
    if (!(out.b_bar > 0.0)) throw ValidationError("localization bound needs a positive growth rate");
    const double c = 2.0 / out.b_bar;
    for (std::size_t i = 0; i < a.grid.size(); ++i)
        out.r = std::max(out.r, std::abs(a.grid.x(i)) - c * std::abs(a.values[i]));
    out.kinetic = std::sqrt(std::max(0.0, energy(packet0)));
    out.a_norm = a_moment(packet0);
    out.value = out.r + c * (2.0 * std::numbers::sqrt2 * out.kinetic + out.a_norm);
    return out;
}

ObservableSeries simulate(const FiberedWavePacket& packet0, const std::vector<double>& times) {
    for (double t : times)
        if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("sample times must be positive");
    const ResidualEvaluator eval(packet0);
    ObservableSeries s;
    for (double t : times) {
        const FiberedWavePacket pt = evolve(packet0, t);
        s.times.push_back(t);
        s.norm.push_back(norm(pt));
        s.energy.push_back(energy(pt));
        s.q1_moment.push_back(q1_moment(pt));
        s.q2_mean.push_back(eval.q2_mean(t));
        s.ballistic_residual.push_back(eval.residual(t));
    }
    return s;
}

std::vector<double> log_spaced_times(double t_min, double t_max, std::size_t count) {
    if (!(t_min > 0.0) || !(t_max > t_min) || count < 2)
        throw ValidationError("log-spaced times need 0 < t_min < t_max and count >= 2");
    std::vector<double> t(count);
    const double r = std::log(t_max / t_min);
    for (std::size_t i = 0; i < count; ++i)
        t[i] = t_min * std::exp(r * static_cast<double>(i) / static_cast<double>(count - 1));
    t.back() = t_max;
    return t;
}

}  // namespace umf
