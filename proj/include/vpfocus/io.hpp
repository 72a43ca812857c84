#pragma once

// Serialization helpers: locale-independent numbers, CSV tables, parameter JSON.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vpfocus/dynamics.hpp"
#include "vpfocus/observables.hpp"
#include "vpfocus/params.hpp"

namespace vpfocus {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// Flat JSON object: every constant plus the a0 term breakdown and T constraints.
Json params_to_json(const ParameterSet& params);

/// Writes `text` to `path`, throwing std::runtime_error with the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// CSV `t,shell_id,r,w,l,mu,m_enclosed`, one row per shell in id order.
std::string ensemble_csv(const Ensemble& ens);
/// Same header; rows for every snapshot in time order, then by shell id.
std::string snapshots_csv(const Ensemble& ens, const std::vector<Snapshot>& snapshots);
/// CSV `r_mid,rho`.
std::string density_profile_csv(const Observables& obs);
/// CSV `r,E`.
std::string field_profile_csv(const Observables& obs);

} // namespace vpfocus
