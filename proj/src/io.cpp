#include "umf/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "umf/error.hpp"

namespace umf::io {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const json& require(const json& j, const char* key, const char* what) {
    if (!j.is_object() || !j.contains(key))
        throw ValidationError(std::string(what) + ": missing field '" + key + "'");
    return j.at(key);
}

double number(const json& j, const char* key, const char* what) {
    const json& v = require(j, key, what);
    if (!v.is_number()) throw ValidationError(std::string(what) + ": field '" + key + "' must be a number");
    return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const char* what) {
    return j.contains(key) ? number(j, key, what) : fallback;
}

std::vector<double> numbers(const json& j, const char* key, const char* what) {
    const json& v = require(j, key, what);
    if (!v.is_array()) throw ValidationError(std::string(what) + ": field '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ValidationError(std::string(what) + ": '" + key + "' holds a non-number");
        out.push_back(e.get<double>());
    }
    return out;
}

std::string type_of(const json& j, const char* what) {
    const json& t = require(j, "type", what);
    if (!t.is_string()) throw ValidationError(std::string(what) + ": 'type' must be a string");
    return t.get<std::string>();
}

std::pair<std::vector<double>, std::vector<double>> table(const json& j, const char* first, const char* second,
                                                          const fs::path& base_dir, const char* what) {
    if (j.contains("csv")) {
        fs::path p = require(j, "csv", what).get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        return read_two_column_csv(p);
    }
    return {numbers(j, first, what), numbers(j, second, what)};
}

}  // namespace

json to_json(const CovarianceModel& cov) {
    return std::visit(overloaded{
                          [](const GaussianKernel& k) {
                              return json{{"type", "gaussian_kernel"},
                                          {"variance", k.variance},
                                          {"correlation_length", k.correlation_length}};
                          },
                          [](const ExponentialKernel& k) {
                              return json{{"type", "exponential_kernel"},
                                          {"variance", k.variance},
                                          {"correlation_length", k.correlation_length}};
                          },
                          [](const TabulatedCovariance& t) {
                              return json{{"type", "tabulated"}, {"lags", t.lags}, {"values", t.values}};
                          },
                      },
                      cov);
}

json to_json(const ProfileFunction& u) {
    return std::visit(overloaded{
                          [](const BumpProfile& b) {
                              return json{{"type", "bump"}, {"amplitude", b.amplitude}, {"half_width", b.half_width}};
                          },
                          [](const TabulatedProfile& t) {
                              return json{{"type", "tabulated"}, {"offsets", t.offsets}, {"values", t.values}};
                          },
                      },
                      u);
}

json to_json(const DistributionModel& d) {
    return std::visit(overloaded{
                          [](const NormalDistribution& n) {
                              return json{{"type", "normal"}, {"mean", n.mean}, {"stddev", n.stddev}};
                          },
                          [](const UniformDistribution& u) {
                              return json{{"type", "uniform"}, {"lo", u.lo}, {"hi", u.hi}};
                          },
                          [](const DiscreteDistribution& t) {
                              return json{{"type", "discrete"}, {"values", t.values}, {"weights", t.weights}};
                          },
                      },
                      d);
}

namespace {

json gaussian_json(const GaussianField& g) {
    json j{{"type", "gaussian"},
           {"mu", g.mu},
           {"covariance", to_json(g.covariance)},
           {"sampler", g.sampler == GaussianSampler::circulant ? "circulant" : "karhunen_loeve"}};
    if (g.sampler == GaussianSampler::karhunen_loeve) {
        j["kl_half_length"] = g.kl_half_length;
        j["kl_modes"] = g.kl_modes;
    }
    return j;
}

GaussianField gaussian_from_json(const json& j, const fs::path& base_dir) {
    GaussianField g;
    g.mu = number(j, "mu", "gaussian field");
    g.covariance = covariance_from_json(require(j, "covariance", "gaussian field"), base_dir);
    const std::string sampler = j.value("sampler", std::string("circulant"));
    if (sampler == "circulant") {
        g.sampler = GaussianSampler::circulant;
    } else if (sampler == "karhunen_loeve") {
        g.sampler = GaussianSampler::karhunen_loeve;
    } else {
        throw ValidationError("gaussian field: unknown sampler '" + sampler + "'");
    }
    g.kl_half_length = number_or(j, "kl_half_length", 0.0, "gaussian field");
    const double modes = number_or(j, "kl_modes", 0.0, "gaussian field");
    if (modes < 0.0 || modes != std::floor(modes)) throw ValidationError("gaussian field: kl_modes must be a count");
    g.kl_modes = static_cast<std::size_t>(modes);
    return g;
}

}  // namespace

json to_json(const FieldSpec& spec) {
    return std::visit(
        overloaded{
            [](const ConstantField& c) { return json{{"type", "constant"}, {"b0", c.b0}}; },
            [](const StepField& s) { return json{{"type", "step"}, {"b_left", s.b_left}, {"b_right", s.b_right}}; },
            [](const TanhField& t) {
                return json{{"type", "tanh"},
                            {"b_minus_inf", t.b_minus_inf},
                            {"b_plus_inf", t.b_plus_inf},
                            {"width", t.width}};
            },
            [](const GaussianField& g) { return gaussian_json(g); },
            [](const SquaredGaussianField& s) {
                return json{{"type", "squared_gaussian"}, {"b_minus", s.b_minus}, {"inner", gaussian_json(s.inner)}};
            },
            [](const PoissonField& p) {
                return json{{"type", "poisson"}, {"rho", p.rho}, {"profile", to_json(p.profile)}};
            },
            [](const LatticeField& l) {
                return json{{"type", "lattice_iid"},
                            {"distribution", to_json(l.distribution)},
                            {"profile", to_json(l.profile)}};
            },
        },
        spec);
}

CovarianceModel covariance_from_json(const json& j, const fs::path& base_dir) {
    const std::string type = type_of(j, "covariance");
    CovarianceModel out;
    if (type == "gaussian_kernel") {
        out = GaussianKernel{number(j, "variance", "covariance"), number(j, "correlation_length", "covariance")};
    } else if (type == "exponential_kernel") {
        out = ExponentialKernel{number(j, "variance", "covariance"), number(j, "correlation_length", "covariance")};
    } else if (type == "tabulated") {
        auto [lags, values] = table(j, "lags", "values", base_dir, "covariance");
        out = TabulatedCovariance{std::move(lags), std::move(values)};
    } else {
        throw ValidationError("covariance: unknown type '" + type + "'");
    }
    validate(out);
    return out;
}

ProfileFunction profile_from_json(const json& j, const fs::path& base_dir) {
    const std::string type = type_of(j, "profile");
    ProfileFunction out;
    if (type == "bump") {
        out = BumpProfile{number(j, "amplitude", "profile"), number(j, "half_width", "profile")};
    } else if (type == "tabulated") {
        auto [offsets, values] = table(j, "offsets", "values", base_dir, "profile");
        out = TabulatedProfile{std::move(offsets), std::move(values)};
    } else {
        throw ValidationError("profile: unknown type '" + type + "'");
    }
    validate(out);
    return out;
}

DistributionModel distribution_from_json(const json& j) {
    const std::string type = type_of(j, "distribution");
    DistributionModel out;
    if (type == "normal") {
        out = NormalDistribution{number(j, "mean", "distribution"), number(j, "stddev", "distribution")};
    } else if (type == "uniform") {
        out = UniformDistribution{number(j, "lo", "distribution"), number(j, "hi", "distribution")};
    } else if (type == "discrete") {
        out = DiscreteDistribution{numbers(j, "values", "distribution"), numbers(j, "weights", "distribution")};
    } else {
        throw ValidationError("distribution: unknown type '" + type + "'");
    }
    validate(out);
    return out;
}

FieldSpec field_spec_from_json(const json& j, const fs::path& base_dir) {
    const std::string type = type_of(j, "field");
    FieldSpec out;
    if (type == "constant") {
        out = ConstantField{number(j, "b0", "constant field")};
    } else if (type == "step") {
        out = StepField{number(j, "b_left", "step field"), number(j, "b_right", "step field")};
    } else if (type == "tanh") {
        out = TanhField{number(j, "b_minus_inf", "tanh field"), number(j, "b_plus_inf", "tanh field"),
                        number(j, "width", "tanh field")};
    } else if (type == "gaussian") {
        out = gaussian_from_json(j, base_dir);
    } else if (type == "squared_gaussian") {
        out = SquaredGaussianField{number(j, "b_minus", "squared_gaussian field"),
                                   gaussian_from_json(require(j, "inner", "squared_gaussian field"), base_dir)};
    } else if (type == "poisson") {
        out = PoissonField{number(j, "rho", "poisson field"),
                           profile_from_json(require(j, "profile", "poisson field"), base_dir)};
    } else if (type == "lattice_iid") {
        out = LatticeField{distribution_from_json(require(j, "distribution", "lattice_iid field")),
                           profile_from_json(require(j, "profile", "lattice_iid field"), base_dir)};
    } else {
        throw ValidationError("field: unknown type '" + type + "'");
    }
    validate(out);
    return out;
}

json to_json(const Grid1D& grid) {
    return json{{"x_min", grid.x_min()}, {"x_max", grid.x_max()}, {"n_points", grid.size()}};
}

Grid1D grid_from_json(const json& j) {
    const double lo = number(j, "x_min", "grid");
    const double hi = number(j, "x_max", "grid");
    if (j.contains("n_points")) {
        const double n = number(j, "n_points", "grid");
        if (n < 3.0 || n != std::floor(n)) throw ValidationError("grid: n_points must be an integer >= 3");
        return Grid1D(lo, hi, static_cast<std::size_t>(n));
    }
    return Grid1D::with_spacing(lo, hi, number(j, "spacing", "grid"));
}

json to_json(const KGrid& kgrid) {
    return json{{"k_min", kgrid.k_min()}, {"k_max", kgrid.k_max()}, {"n_k", kgrid.size()}};
}

std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(const fs::path& path) {
    std::istringstream in(read_text(path));
    std::vector<double> a, b;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto comma = line.find(',');
        double x = 0.0, y = 0.0;
        bool ok = comma != std::string::npos;
        if (ok) {
            try {
                std::size_t used = 0;
                x = std::stod(line.substr(0, comma), &used);
                y = std::stod(line.substr(comma + 1), &used);
            } catch (const std::exception&) {
                ok = false;
            }
        }
        if (!ok) {
            if (line_no == 1 && a.empty()) continue;
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected two numbers");
        }
        a.push_back(x);
        b.push_back(y);
    }
    if (a.empty()) throw ValidationError(path.string() + ": no data rows");
    return {std::move(a), std::move(b)};
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw ValidationError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw ValidationError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_field(const FieldRealization& field, const FieldSpec& spec, const fs::path& csv_path,
                 const fs::path& sidecar_path) {
    std::string csv = "x,b\n";
    for (std::size_t i = 0; i < field.grid.size(); ++i)
        csv += format_double(field.grid.x(i)) + "," + format_double(field.values[i]) + "\n";
    write_text(csv_path, csv);
    json side{{"spec", to_json(spec)}, {"grid", to_json(field.grid)}};
    side["seed"] = field.seed ? json(*field.seed) : json(nullptr);
    write_text(sidecar_path, side.dump(2) + "\n");
}

FieldRealization read_field_csv(const fs::path& path) {
    auto [x, b] = read_two_column_csv(path);
    if (x.size() < 3) throw ValidationError(path.string() + ": a field needs at least three rows");
    FieldRealization out{Grid1D(x.front(), x.back(), x.size()), std::move(b), "csv", std::nullopt};
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(x[i] - out.grid.x(i)) > 1e-9 * std::max(1.0, out.grid.spacing()))
            throw ValidationError(path.string() + ": x column is not a uniform grid");
    return out;
}

std::string bands_csv(const std::vector<BandFunction>& funcs) {
    std::string csv = "n,k,energy,velocity\n";
    for (const auto& f : funcs)
        for (std::size_t j = 0; j < f.kgrid.size(); ++j)
            csv += std::to_string(f.n) + "," + format_double(f.kgrid.k(j)) + "," + format_double(f.energies[j]) +
                   "," + format_double(f.velocities[j]) + "\n";
    return csv;
}

json bands_summary(const BandStructure& bs, const SpectrumClassification& spectrum,
                   const std::vector<Interval>& velocity_bands) {
    json bands = json::array();
    for (std::size_t i = 0; i < bs.bands.size(); ++i) {
        const auto& b = bs.bands[i];
        json e{{"n", b.n}, {"inf", b.inf}, {"sup", b.sup}, {"bandwidth", b.bandwidth}, {"flat", b.flat}};
        if (i < velocity_bands.size()) e["velocity"] = {velocity_bands[i].lo, velocity_bands[i].hi};
        bands.push_back(std::move(e));
    }
    json ac = json::array();
    for (const auto& iv : spectrum.ac) ac.push_back({iv.lo, iv.hi});
    json out{{"spec_id", bs.spec_id},
             {"grid", to_json(bs.grid)},
             {"kgrid", to_json(bs.kgrid)},
             {"n_max", bs.n_max},
             {"tol_flat", bs.tol_flat},
             {"inner_approximation", true},
             {"bands", std::move(bands)},
             {"ac", std::move(ac)},
             {"pp", spectrum.pp}};
    out["seed"] = bs.seed ? json(*bs.seed) : json(nullptr);
    return out;
}

std::string bands_svg(const std::vector<BandFunction>& funcs) {
    constexpr double width = 720, height = 480, left = 70, right = 20, top = 20, bottom = 50;
    double k0 = 0, k1 = 1, e0 = 0, e1 = 1;
    bool first = true;
    for (const auto& f : funcs) {
        for (std::size_t j = 0; j < f.kgrid.size(); ++j) {
            const double k = f.kgrid.k(j), e = f.energies[j];
            if (first) {
                k0 = k1 = k;
                e0 = e1 = e;
                first = false;
            }
            k0 = std::min(k0, k), k1 = std::max(k1, k), e0 = std::min(e0, e), e1 = std::max(e1, e);
        }
    }
    e0 = std::min(e0, 0.0);
    if (e1 - e0 < 1e-12) e1 = e0 + 1.0;
    if (k1 - k0 < 1e-12) k1 = k0 + 1.0;
    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double k) { return left + (k - k0) / (k1 - k0) * pw; };
    auto py = [&](double e) { return top + (1.0 - (e - e0) / (e1 - e0)) * ph; };
    static constexpr std::array<const char*, 6> colors = {"#1f77b4", "#d62728", "#2ca02c",
                                                          "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream s;
    s.precision(6);
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double k = k0 + (k1 - k0) * t / 4.0, e = e0 + (e1 - e0) * t / 4.0;
        s << "<text x=\"" << px(k) << "\" y=\"" << height - bottom + 18 << "\" font-size=\"12\" text-anchor=\"middle\">"
          << k << "</text>\n";
        s << "<text x=\"" << left - 6 << "\" y=\"" << py(e) + 4 << "\" font-size=\"12\" text-anchor=\"end\">" << e
          << "</text>\n";
    }
    s << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 8 << "\" font-size=\"14\" text-anchor=\"middle\">k</text>\n";
    s << "<text x=\"16\" y=\"" << top + ph / 2 << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << top + ph / 2 << ")\">energy</text>\n";
    for (const auto& f : funcs) {
        s << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colors[static_cast<std::size_t>(f.n) % colors.size()]
          << "\" points=\"";
        for (std::size_t j = 0; j < f.kgrid.size(); ++j) s << px(f.kgrid.k(j)) << "," << py(f.energies[j]) << " ";
        s << "\"/>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::string dynamics_csv(const ObservableSeries& series) {
    std::string csv = "t,norm,q1_moment,q2_mean,ballistic_residual\n";
    for (std::size_t i = 0; i < series.times.size(); ++i)
        csv += format_double(series.times[i]) + "," + format_double(series.norm[i]) + "," +
               format_double(series.q1_moment[i]) + "," + format_double(series.q2_mean[i]) + "," +
               format_double(series.ballistic_residual[i]) + "\n";
    return csv;
}

std::string fiber_dump_csv(const EffectivePotential& v, const EigenSolution& sol) {
    if (!(v.grid == sol.grid)) throw ValidationError("fiber dump: potential and eigenvectors use different grids");
    std::string csv = "x,v";
    for (std::size_t n = 0; n < sol.bands(); ++n) csv += ",phi" + std::to_string(n);
    csv += "\n";
    for (std::size_t i = 0; i < v.grid.size(); ++i) {
        csv += format_double(v.grid.x(i)) + "," + format_double(v.values[i]);
        for (std::size_t n = 0; n < sol.bands(); ++n) csv += "," + format_double(sol.eigenvectors[n][i]);
        csv += "\n";
    }
    return csv;
}

}  // namespace umf::io
