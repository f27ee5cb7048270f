#pragma once
#include <filesystem>
#include <string>

#include <json.hpp>

#include "shrinker/anciaux.hpp"
#include "shrinker/catalog.hpp"
#include "shrinker/functional.hpp"
#include "shrinker/stability.hpp"
#include "shrinker/tolerances.hpp"

namespace shrinker {

inline constexpr int kSchemaVersion = 1;

void to_json(nlohmann::json& j, const Tolerances& tolerances);
void from_json(const nlohmann::json& j, Tolerances& tolerances);
void to_json(nlohmann::json& j, const ConstraintResiduals& residuals);
void from_json(const nlohmann::json& j, ConstraintResiduals& residuals);
void to_json(nlohmann::json& j, const StabilityReport& report);
void from_json(const nlohmann::json& j, StabilityReport& report);
void to_json(nlohmann::json& j, const FEvaluation& eval);

nlohmann::json grid_meta(const Grid& grid);

// {schema_version, shrinker_spec, mode, Q, residuals, verdict, tolerances, grid_meta, ...}.
nlohmann::json stability_document(const ShrinkerSpec& spec, const Grid& grid, const StabilityReport& report,
                                  const Tolerances& tolerances);

// Profile curve as CSV with header s,r,theta,phi,E_check.
std::string profile_csv(const ProfileCurve& curve);
nlohmann::json profile_summary(const ProfileCurve& curve);

// Writes to a sibling temporary file, then renames over the target.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

// Deterministic text form used for every JSON output.
std::string dump(const nlohmann::json& document);

}  // namespace shrinker
