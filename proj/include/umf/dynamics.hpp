#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "umf/bands.hpp"

namespace umf {

/// Band-resolved velocity data per fiber: the Feynman-Hellmann slopes (fibres
/// of the asymptotic velocity operator) and the full band matrix
/// M_nm = <phi_n, (k - a) phi_m>_h used by the time-averaged velocity.
struct VelocityOperatorData {
    std::vector<Eigen::VectorXd> velocities;
    std::vector<Eigen::MatrixXd> band_matrix;
};

VelocityOperatorData velocity_operator_data(const FiberSweep& sweep, std::size_t threads = 0);

/// Everything a packet needs about the fibers, shared read-only between packets.
/// Eigenvector signs are aligned between neighbouring k (overlap > 0) so that
/// k-derivatives of fiber states are smooth.
struct PacketBasis {
    FiberSweep sweep;
    VelocityOperatorData velocity;
    std::vector<Eigen::MatrixXd> q1_squared;  ///< h sum x^2 phi_n phi_m
    std::vector<Eigen::MatrixXd> a_squared;   ///< h sum a^2 phi_n phi_m

    std::size_t bands() const { return sweep.bands(); }
    std::size_t k_points() const { return sweep.kgrid.size(); }
    double dk() const { return sweep.kgrid.spacing(); }
    /// n_points x bands matrix of fiber eigenvectors at k_j
    Eigen::MatrixXd states(std::size_t j) const;
};

std::shared_ptr<const PacketBasis> make_packet_basis(FiberSweep sweep, std::size_t threads = 0);

enum class PacketProfile { ground_state, gaussian };

struct PacketSpec {
    double x2_center = 0.0;
    double k_center = 0.0;
    double k_width = 0.5;  ///< sigma_k
    PacketProfile profile = PacketProfile::ground_state;
    double x1_center = 0.0;  ///< gaussian profile only
    double x1_width = 1.0;   ///< gaussian profile only, position-space sigma
    double min_capture = 0.999;
};

/// Wave packet in the fibered band representation: coefficients(n, j) = c_n(k_j).
/// Norm^2 = dk sum |c|^2.
struct FiberedWavePacket {
    std::shared_ptr<const PacketBasis> basis;
    Eigen::MatrixXcd coefficients;
    double capture = 1.0;
    double time = 0.0;
};

/// Gaussian in k, (2 pi s^2)^(-1/4) exp(-(k - k0)^2 / (4 s^2) - i k x2_0), times
/// the chosen x1-profile, projected onto the computed bands and renormalized.
/// Throws ValidationError if the capture falls below spec.min_capture or the
/// envelope has not decayed to 1e-6 of its peak at the k-window edges.
FiberedWavePacket prepare_packet(std::shared_ptr<const PacketBasis> basis, const PacketSpec& spec);

/// c_n(k) -> exp(-i t eps_n(k)) c_n(k)
FiberedWavePacket evolve(const FiberedWavePacket& packet, double t);

double norm(const FiberedWavePacket& packet);
/// ||H^{1/2} psi||^2 = dk sum eps_n(k) |c_n(k)|^2
double energy(const FiberedWavePacket& packet);
/// ||Q1 psi||
double q1_moment(const FiberedWavePacket& packet);
/// ||a(Q1) psi||
double a_moment(const FiberedWavePacket& packet);

/// c_n(k) -> (d eps_n/dk) c_n(k)
FiberedWavePacket asymptotic_velocity_apply(const FiberedWavePacket& packet);

/// Averaged phase factor (exp(i t d) - 1)/(i t d), with tau(0) = 1.
std::complex<double> averaged_phase(double delta, double t);

/// (K c)_n = sum_m M_nm kernel(eps_n - eps_m) c_m on every fiber.
FiberedWavePacket apply_band_kernel(const FiberedWavePacket& packet,
                                    const std::function<std::complex<double>(double)>& kernel);

/// The vector V_{2,t} psi_0 (kernel = averaged_phase(., t)). Throws for t = 0.
FiberedWavePacket time_averaged_velocity_apply(const FiberedWavePacket& packet0, double t);

/// Q2 psi on the x1 grid: i d/dk of the fiber states. Five-point central
/// differences in k, three-point next to the ends and second-order one-sided
/// stencils at the window ends. Column j holds
/// the x1 grid function at k_j.
Eigen::MatrixXcd q2_apply(const FiberedWavePacket& packet);

double q2_norm(const FiberedWavePacket& packet0);

/// <psi_t, Q2 psi_t> via Q_{2,t} psi_0 = Q2 psi_0 + t V_{2,t} psi_0.
double q2_mean(const FiberedWavePacket& packet0, double t);

/// ||Q2 psi_0 / t + V_{2,t} psi_0 - V_{2,inf} psi_0||. Throws for t = 0.
double ballistic_residual(const FiberedWavePacket& packet0, double t);

/// Precomputed pieces of the residual so a time series costs O(bands^2 n_k) per t.
class ResidualEvaluator {
public:
    explicit ResidualEvaluator(const FiberedWavePacket& packet0);
    double residual(double t) const;
    double q2_mean(double t) const;
    double q2_norm() const { return std::sqrt(q2_norm_sq_); }

private:
    FiberedWavePacket packet0_;
    Eigen::MatrixXcd projected_q2_;  ///< Phi^T (Q2 psi_0) per fiber
    double q2_norm_sq_ = 0.0;
    double q2_mean0_ = 0.0;
};

/// Uniform-in-time bound on ||Q1 psi_t||:
///   r + (2 / b_bar) (2 sqrt(2) ||H^{1/2} psi_0|| + ||a(Q1) psi_0||)
/// where b_bar is the growth rate of a and r the smallest length with
/// |x| <= r + (2 / b_bar) |a(x)| on every grid point.
struct LocalizationBound {
    double b_bar = 0.0;
    double r = 0.0;
    double kinetic = 0.0;   ///< ||H^{1/2} psi_0||
    double a_norm = 0.0;    ///< ||a(Q1) psi_0||
    double value = 0.0;
};

LocalizationBound localization_bound(const FiberedWavePacket& packet0, double b_bar = 0.0);

struct ObservableSeries {
    std::vector<double> times;
    std::vector<double> norm;
    std::vector<double> energy;
    std::vector<double> q1_moment;
    std::vector<double> q2_mean;
    std::vector<double> ballistic_residual;
};

ObservableSeries simulate(const FiberedWavePacket& packet0, const std::vector<double>& times);

/// count times log-spaced on [t_min, t_max]
std::vector<double> log_spaced_times(double t_min, double t_max, std::size_t count);

}  // namespace umf
