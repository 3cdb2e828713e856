#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "umf/dynamics.hpp"
#include "umf/io.hpp"

namespace umf {

struct KGridConfig {
    std::optional<double> k_min;  ///< both unset: default window
    std::optional<double> k_max;
    std::size_t n_k = 101;
};

struct DynamicsConfig {
    PacketSpec packet;
    double horizon = 200.0;
    std::size_t samples = 64;
    double t_min = 1.0;  ///< first of the log-spaced sample times
};

/// Everything a run depends on. The JSON echo written into each run
/// directory reproduces the run.
struct RunConfig {
    FieldSpec field = ConstantField{1.0};
    Grid1D grid = Grid1D::with_spacing(-20.0, 20.0, 0.01);
    KGridConfig kgrid;
    int n_max = 5;
    double tol_flat = 1e-6;
    DynamicsConfig dynamics;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::size_t threads = 0;
    std::size_t ensemble = 1;
    bool svg = false;
    std::optional<double> verify_shift;
    std::map<std::string, double> tolerances;  ///< acceptance overrides
};

io::json to_json(const RunConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const io::json& j, const io::fs::path& base_dir = {});
RunConfig load_run_config(const io::fs::path& path);

/// The k-grid a config asks for: explicit bounds, or the default window of
/// the realization's vector potential.
KGrid resolve_kgrid(const RunConfig& config, const VectorPotential& a, const FieldRealization& field);

/// Packets need a window around k_center: k_center +- 8 sigma_k unless the
/// config gives explicit bounds.
KGrid resolve_packet_kgrid(const RunConfig& config);

}  // namespace umf
