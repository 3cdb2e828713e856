#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>

#include "umf/acceptance.hpp"
#include "umf/config.hpp"
#include "umf/error.hpp"

namespace {

using umf::io::fs::path;
using umf::io::json;

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::optional<std::string> out;
    std::optional<std::size_t> ensemble;
    bool svg = false;
    std::string verify_shift;
    std::optional<double> dump_fiber;
    std::string report = "text";
    std::vector<int> only;
};

umf::RunConfig load(const Flags& f) {
    umf::RunConfig c = f.config.empty() ? umf::RunConfig{} : umf::load_run_config(f.config);
    if (f.seed) c.seed = f.seed;
    if (f.threads) c.threads = *f.threads;
    if (f.out) c.out = *f.out;
    if (f.ensemble) c.ensemble = *f.ensemble;
    if (f.svg) c.svg = true;
    if (!f.verify_shift.empty()) {
        std::string v = f.verify_shift;
        if (v.rfind("z=", 0) == 0) v = v.substr(2);
        try {
            c.verify_shift = std::stod(v);
        } catch (const std::exception&) {
            throw umf::ValidationError("--verify-shift expects z=<shift>");
        }
    }
    if (c.ensemble == 0) throw umf::ValidationError("--ensemble must be >= 1");
    return c;
}

/// Seeds of the run: seed + i for i < ensemble, or one unseeded run.
std::vector<std::optional<std::uint64_t>> seeds_of(const umf::RunConfig& c) {
    if (umf::is_random(c.field) && !c.seed) throw umf::ValidationError("random field specs need --seed");
    std::vector<std::optional<std::uint64_t>> out;
    for (std::size_t i = 0; i < c.ensemble; ++i)
        out.push_back(c.seed ? std::optional<std::uint64_t>(*c.seed + i) : std::nullopt);
    return out;
}

path run_dir(const umf::RunConfig& c, const std::optional<std::uint64_t>& seed) {
    if (c.ensemble == 1) return c.out;
    return path(c.out) / ("seed_" + std::to_string(seed.value_or(0)));
}

void echo_config(const umf::RunConfig& c) { umf::io::write_text(path(c.out) / "config.json", to_json(c).dump(2) + "\n"); }

int cmd_sample_field(const umf::RunConfig& c) {
    echo_config(c);
    for (const auto& seed : seeds_of(c)) {
        const umf::FieldRealization f = umf::sample_field(c.field, c.grid, seed);
        const std::string stem = c.ensemble == 1 ? "field" : "field_" + std::to_string(seed.value_or(0));
        umf::io::write_field(f, c.field, path(c.out) / (stem + ".csv"), path(c.out) / (stem + ".json"));
        std::printf("wrote %s\n", (path(c.out) / (stem + ".csv")).c_str());
    }
    return 0;
}

int cmd_bands(const umf::RunConfig& c, const Flags& flags) {
    echo_config(c);
    umf::SweepOptions opts;
    opts.threads = c.threads;
    for (const auto& seed : seeds_of(c)) {
        const umf::FieldRealization f = umf::sample_field(c.field, c.grid, seed);
        const umf::VectorPotential a = umf::vector_potential(f);
        const umf::KGrid kg = umf::resolve_kgrid(c, a, f);
        const auto funcs = umf::band_functions(umf::sweep_fibers(a, kg, c.n_max, opts));
        umf::BandStructure bs = umf::assemble_bands(funcs, c.tol_flat);
        bs.spec_id = f.spec_id;
        bs.seed = f.seed;
        bs.grid = f.grid;
        json summary = umf::io::bands_summary(bs, umf::spectrum_sets(bs), umf::velocity_bands(funcs));
        summary["spec"] = umf::io::to_json(c.field);
        if (c.verify_shift) {
            const double dev = umf::verify_shift_covariance(f, *c.verify_shift, kg, c.n_max, opts);
            summary["shift_covariance"] = {{"z", *c.verify_shift}, {"max_deviation", dev}};
            std::printf("shift covariance z=%g: max deviation %.6e\n", *c.verify_shift, dev);
        }
        const path dir = run_dir(c, seed);
        umf::io::write_text(dir / "bands.csv", umf::io::bands_csv(funcs));
        umf::io::write_text(dir / "bands_summary.json", summary.dump(2) + "\n");
        if (c.svg) umf::io::write_text(dir / "bands.svg", umf::io::bands_svg(funcs));
        if (flags.dump_fiber) {
            const umf::FiberOperator op = umf::assemble_fiber(a, *flags.dump_fiber);
            const umf::EigenSolution sol = umf::solve_fiber(op, c.n_max);
            umf::io::write_text(dir / "fiber.csv",
                                umf::io::fiber_dump_csv(umf::effective_potential(a, *flags.dump_fiber), sol));
        }
        for (const auto& b : bs.bands)
            std::printf("band %d: [%.8f, %.8f] width %.3e %s\n", b.n, b.inf, b.sup, b.bandwidth,
                        b.flat ? "flat" : "");
    }
    return 0;
}

int cmd_dynamics(const umf::RunConfig& c) {
    echo_config(c);
    umf::SweepOptions opts;
    opts.threads = c.threads;
    for (const auto& seed : seeds_of(c)) {
        const umf::FieldRealization f = umf::sample_field(c.field, c.grid, seed);
        const umf::VectorPotential a = umf::vector_potential(f);
        const umf::KGrid kg = umf::resolve_packet_kgrid(c);
        auto basis = umf::make_packet_basis(umf::sweep_fibers(a, kg, c.n_max, opts), c.threads);
        const umf::FiberedWavePacket p0 = umf::prepare_packet(basis, c.dynamics.packet);
        const auto times = umf::log_spaced_times(c.dynamics.t_min, c.dynamics.horizon, c.dynamics.samples);
        const umf::ObservableSeries s = umf::simulate(p0, times);
        const umf::LocalizationBound lb = umf::localization_bound(p0);
        double sup_q1 = umf::q1_moment(p0);
        for (double q : s.q1_moment) sup_q1 = std::max(sup_q1, q);
        json summary{{"spec", umf::io::to_json(c.field)},
                     {"grid", umf::io::to_json(c.grid)},
                     {"kgrid", umf::io::to_json(kg)},
                     {"n_max", c.n_max},
                     {"packet", to_json(c)["dynamics"]["packet"]},
                     {"capture", p0.capture},
                     {"energy", umf::energy(p0)},
                     {"asymptotic_velocity_norm", umf::norm(umf::asymptotic_velocity_apply(p0))},
                     {"q2_norm", umf::q2_norm(p0)},
                     {"sup_q1_moment", sup_q1},
                     {"localization_bound",
                      {{"value", lb.value}, {"r", lb.r}, {"b_bar", lb.b_bar}, {"kinetic", lb.kinetic},
                       {"a_norm", lb.a_norm}}},
                     {"final_time", s.times.back()},
                     {"final_ballistic_residual", s.ballistic_residual.back()},
                     {"final_q2_mean", s.q2_mean.back()}};
        summary["seed"] = f.seed ? json(*f.seed) : json(nullptr);
        const path dir = run_dir(c, seed);
        umf::io::write_text(dir / "dynamics.csv", umf::io::dynamics_csv(s));
        umf::io::write_text(dir / "dynamics_summary.json", summary.dump(2) + "\n");
        std::printf("capture %.6f, sup ||Q1 psi_t|| %.4f (bound %.4f), residual at t=%g: %.4e\n", p0.capture, sup_q1,
                    lb.value, s.times.back(), s.ballistic_residual.back());
    }
    return 0;
}

int cmd_verify(const umf::RunConfig& c, const Flags& f) {
    umf::AcceptanceOptions opts;
    opts.overrides = c.tolerances;
    opts.threads = c.threads;
    opts.only = f.only;
    const auto results = umf::run_acceptance(opts);
    const bool ok = umf::acceptance_passed(results);
    if (f.report == "json") {
        std::cout << umf::report_json(results).dump(2) << "\n";
    } else {
        for (const auto& r : results) std::cout << umf::format_result(r) << "\n";
        std::cout << (ok ? "all blocking checks passed" : "verification failed") << "\n";
    }
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    // stdout carries reports; diagnostics go to stderr
    spdlog::set_default_logger(spdlog::stderr_color_mt("umfband"));
    CLI::App app{"Band structure and wave-packet dynamics for unidirectionally constant magnetic fields"};
    app.require_subcommand(1);
    Flags flags;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "base seed");
        sub->add_option("--threads", flags.threads, "worker threads (0 = all cores)");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--ensemble", flags.ensemble, "number of realizations, seeds seed+i");
    };
    auto* sample = app.add_subcommand("sample-field", "sample a field realization");
    auto* bands = app.add_subcommand("bands", "band functions and band intervals");
    auto* dynamics = app.add_subcommand("dynamics", "wave-packet observables");
    auto* verify = app.add_subcommand("verify", "run the acceptance checks");
    for (auto* sub : {sample, bands, dynamics, verify}) common(sub);
    bands->add_flag("--svg", flags.svg, "also write bands.svg");
    bands->add_option("--verify-shift", flags.verify_shift, "check shift covariance, e.g. z=2");
    bands->add_option("--dump-fiber", flags.dump_fiber, "write fiber.csv (x, v, eigenvectors) at this k");
    verify->add_option("--report", flags.report, "text or json")->check(CLI::IsMember({"text", "json"}));
    verify->add_option("--only", flags.only, "criterion ids to run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const umf::RunConfig config = load(flags);
        if (*sample) return cmd_sample_field(config);
        if (*bands) return cmd_bands(config, flags);
        if (*dynamics) return cmd_dynamics(config);
        return cmd_verify(config, flags);
    } catch (const umf::ValidationError& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const umf::NumericalError& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
}
