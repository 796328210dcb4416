#pragma once

#include "subwalk/capacity.hpp"
#include "subwalk/green.hpp"
#include "subwalk/massiveness.hpp"
#include "subwalk/montecarlo.hpp"

#include "json.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace subwalk {

using Json = nlohmann::ordered_json;

struct RunManifest {
  std::string subcommand;
  Json parameters = Json::object();
  std::optional<std::uint64_t> seed;
  std::string version = SUBWALK_VERSION;
  std::string timestamp;             // UTC, ISO 8601; SOURCE_DATE_EPOCH when set
  std::vector<std::string> outputs;
};

RunManifest make_manifest(std::string subcommand, Json parameters, std::optional<std::uint64_t> seed = std::nullopt);
/// SOURCE_DATE_EPOCH if set, else the current time.
std::string utc_timestamp();

Json to_json(const RunManifest& m);
Json to_json(const GreenValue& v);
Json to_json(const CapacityResult& r);
Json to_json(const ScanRow& r);
Json to_json(const WienerReport& r);
Json to_json(const ThornClassification& c);
Json to_json(const ThornConsistency& c);
Json to_json(const HyperplaneReport& r);
Json to_json(const HittingEstimate& e);
Json to_json(const TrendReport& r);
Json to_json(const RieszReport& r);

/// RFC 4180 table.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  void write(std::ostream& out) const;
};

std::string csv_escape(const std::string& field);
/// Shortest round-trip decimal.
std::string fmt(double v);

CsvTable to_csv(const WienerReport& r);
CsvTable to_csv(const std::vector<TrendRow>& rows);
CsvTable to_csv(const HyperplaneReport& r);

}  // namespace subwalk
