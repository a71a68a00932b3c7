#pragma once

#include <json.hpp>
#include <string>

#include "qarb/arbitrage.hpp"
#include "qarb/econometrics.hpp"
#include "qarb/vtpa.hpp"

namespace qarb::data {

using Json = nlohmann::ordered_json;

// Writes a report document, embedding the schema version.  The document
// must carry config.seed (reproducibility contract).
void save_report(const Json& doc, const std::string& path);

// Reads and validates a report document: wrong or missing schema_version,
// or a missing config.seed, raises VersionError.
Json load_report(const std::string& path);

}  // namespace qarb::data

namespace qarb::arb {

data::Json to_json(const econ::AdfReport& r);
data::Json to_json(const econ::CointegrationResult& r);
data::Json to_json(const ScreeningReport& r);
data::Json to_json(const vtpa::ScalingReport& r);
data::Json to_json(const ComplexityReport& r);

ScreeningReport screening_report_from_json(const data::Json& j);

}  // namespace qarb::arb
