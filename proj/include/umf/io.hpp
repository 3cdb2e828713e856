#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "umf/bands.hpp"
#include "umf/dynamics.hpp"
#include "umf/field.hpp"

namespace umf::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Field specifications. Tabulated covariances and profiles may be given inline
// ({"lags": [...], "values": [...]}) or as {"csv": "file"} resolved against
// base_dir. Serialization always writes them inline.
json to_json(const CovarianceModel& cov);
json to_json(const ProfileFunction& u);
json to_json(const DistributionModel& d);
json to_json(const FieldSpec& spec);
CovarianceModel covariance_from_json(const json& j, const fs::path& base_dir = {});
ProfileFunction profile_from_json(const json& j, const fs::path& base_dir = {});
DistributionModel distribution_from_json(const json& j);
FieldSpec field_spec_from_json(const json& j, const fs::path& base_dir = {});

json to_json(const Grid1D& grid);
/// {"x_min", "x_max", "n_points"} or {"x_min", "x_max", "spacing"}
Grid1D grid_from_json(const json& j);
json to_json(const KGrid& kgrid);

/// Numeric two-column CSV; a non-numeric first line is taken as a header.
std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(const fs::path& path);

/// Round-trip formatting used by every CSV writer.
std::string format_double(double v);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

/// `x,b` CSV plus the sidecar {spec, seed, grid}.
void write_field(const FieldRealization& field, const FieldSpec& spec, const fs::path& csv_path,
                 const fs::path& sidecar_path);
/// Reads an `x,b` CSV back; the grid is rebuilt from the first and last x.
FieldRealization read_field_csv(const fs::path& path);

/// `n,k,energy,velocity`, rows ordered by n then k.
std::string bands_csv(const std::vector<BandFunction>& funcs);
json bands_summary(const BandStructure& bs, const SpectrumClassification& spectrum,
                   const std::vector<Interval>& velocity_bands);
/// Energy against k, one polyline per band.
std::string bands_svg(const std::vector<BandFunction>& funcs);

/// `t,norm,q1_moment,q2_mean,ballistic_residual`
std::string dynamics_csv(const ObservableSeries& series);

/// `x,v,phi0..phiN` for one solved fiber.
std::string fiber_dump_csv(const EffectivePotential& v, const EigenSolution& sol);

}  // namespace umf::io
