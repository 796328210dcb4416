#include "subwalk/report.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <ostream>

namespace subwalk {

std::string utc_timestamp() {
  std::time_t t = 0;
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH"); e && *e) {
    t = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest make_manifest(std::string subcommand, Json parameters, std::optional<std::uint64_t> seed) {
  RunManifest m;
  m.subcommand = std::move(subcommand);
  m.parameters = std::move(parameters);
  m.seed = seed;
  m.timestamp = utc_timestamp();
  return m;
}

namespace {

// JSON has no infinities or NaN
Json num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

Json to_json(const RunManifest& m) {
  Json j;
  j["subcommand"] = m.subcommand;
  j["parameters"] = m.parameters;
  j["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
  j["version"] = m.version;
  j["timestamp"] = m.timestamp;
  j["outputs"] = m.outputs;
  return j;
}

Json to_json(const GreenValue& v) {
  return {{"value", num(v.value)},          {"error_bound", num(v.error_bound)},
          {"exact_part", num(v.exact_part)}, {"gaussian_part", num(v.gaussian_part)},
          {"tail_part", num(v.tail_part)},   {"gaussian_error", num(v.gaussian_error)},
          {"tail_error", num(v.tail_error)}};
}

Json to_json(const CapacityResult& r) {
  return {{"method", to_string(r.method)},
          {"capacity", num(r.capacity)},
          {"residual", num(r.residual)},
          {"n_points", r.n_points},
          {"d", r.d},
          {"alpha", num(r.alpha)},
          {"solver", r.solver},
          {"iterations", r.iterations},
          {"min_weight", num(r.min_weight)},
          {"negative_weights", r.negative_weights},
          {"warnings", r.warnings}};
}

Json to_json(const ScanRow& r) {
  return {{"parameter", num(r.parameter)}, {"n_points", r.n_points},       {"capacity", num(r.capacity)},
          {"normalizer", num(r.normalizer)}, {"ratio", num(r.ratio)}, {"doubling", num(r.doubling)}};
}

Json to_json(const WienerReport& r) {
  Json rows = Json::array();
  for (const auto& w : r.rows)
    rows.push_back({{"k", w.k},
                    {"n_points", w.n_points},
                    {"n_solved", w.n_solved},
                    {"stride", w.stride},
                    {"capacity", num(w.capacity)},
                    {"chi", num(w.chi)},
                    {"term", num(w.term)},
                    {"partial_sum", num(w.partial_sum)},
                    {"lower_bound", w.lower_bound}});
  return {{"set", r.set},
          {"d", r.d},
          {"alpha", num(r.alpha)},
          {"rows", rows},
          {"fitted_decay_exponent", num(r.fitted_decay_exponent)},
          {"fit_residual", num(r.fit_residual)},
          {"verdict", to_string(r.verdict)},
          {"partial", r.partial},
          {"notes", r.notes}};
}

Json to_json(const ThornClassification& c) {
  Json j{{"verdict", to_string(c.verdict)}, {"route", c.route}, {"reason", c.reason}};
  if (c.terms) {
    Json t = Json::array();
    for (std::size_t i = 0; i < c.terms->n.size(); ++i) t.push_back({{"n", c.terms->n[i]}, {"term", num(c.terms->terms[i])}});
    j["terms"] = t;
  }
  if (c.fat) {
    Json w = Json::array();
    for (const auto& x : c.fat->witnesses)
      w.push_back({{"n", x.n}, {"radius", num(x.radius)}, {"center", x.center.coords}, {"contained", x.contained}});
    j["delta"] = num(c.fat->delta);
    j["witnesses"] = w;
  }
  return j;
}

Json to_json(const ThornConsistency& c) {
  Json rows = Json::array();
  for (const auto& r : c.rows)
    rows.push_back({{"n", r.n},
                    {"shell_term", num(r.shell_term)},
                    {"analytic_term", num(r.analytic_term)},
                    {"ratio", num(r.ratio)},
                    {"lower_bound", r.lower_bound}});
  return {{"rows", rows}, {"band", num(c.band)}};
}

Json to_json(const HyperplaneReport& r) {
  Json rows = Json::array();
  for (const auto& x : r.rows) rows.push_back({{"epsilon", num(x.epsilon)}, {"integral", num(x.integral)}});
  Json g = Json::array();
  for (double v : r.decade_growth) g.push_back(num(v));
  return {{"d", r.d}, {"alpha", num(r.alpha)}, {"rows", rows}, {"decade_growth", g}, {"bounded", r.bounded},
          {"verdict", r.verdict}};
}

Json to_json(const HittingEstimate& e) {
  Json j{{"set", e.set},
         {"start", e.start.coords},
         {"trials", e.trials},
         {"hits", e.hits},
         {"estimate", num(e.estimate)},
         {"ci_low", num(e.ci_low)},
         {"ci_high", num(e.ci_high)},
         {"stopping", e.stopping},
         {"seed", e.seed},
         {"lower_bound", e.lower_bound}};
  if (e.return_bound) j["return_bound"] = num(*e.return_bound);
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

Json to_json(const TrendReport& r) {
  Json rows = Json::array();
  for (const auto& t : r.rows) {
    Json e = to_json(t.estimate);
    e["distance"] = t.distance;
    e["horizon"] = t.horizon;
    rows.push_back(e);
  }
  Json g = Json::array();
  for (double v : r.gap_exponent) g.push_back(num(v));
  return {{"rows", rows}, {"gap_exponent", g}, {"verdict", r.verdict}, {"reason", r.reason}};
}

Json to_json(const RieszReport& r) {
  Json rows = Json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"radius", num(x.radius)}, {"green", num(x.green)}, {"riesz", num(x.riesz)}, {"ratio", num(x.ratio)}});
  return {{"rows", rows},
          {"derived_ratio", num(r.derived_ratio)},
          {"stated_ratio", num(r.stated_ratio)},
          {"closer", r.closer},
          {"discrepancy", std::abs(r.derived_ratio - r.stated_ratio) > 1e-9 * std::abs(r.derived_ratio)}};
}

std::string csv_escape(const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void CsvTable::write(std::ostream& out) const {
  auto line = [&out](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_escape(r[i]);
    out << "\r\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvTable to_csv(const WienerReport& r) {
  CsvTable t{{"k", "n_points", "n_solved", "stride", "capacity", "chi", "term", "partial_sum", "lower_bound"}, {}};
  for (const auto& w : r.rows)
    t.add({std::to_string(w.k), std::to_string(w.n_points), std::to_string(w.n_solved), std::to_string(w.stride),
           fmt(w.capacity), fmt(w.chi), fmt(w.term), fmt(w.partial_sum), w.lower_bound ? "true" : "false"});
  return t;
}

CsvTable to_csv(const std::vector<TrendRow>& rows) {
  CsvTable t{{"set", "start", "distance", "horizon", "trials", "hits", "estimate", "ci_low", "ci_high", "stopping", "seed"}, {}};
  for (const auto& r : rows) {
    const auto& e = r.estimate;
    t.add({e.set, e.start.str(), std::to_string(r.distance), std::to_string(r.horizon), std::to_string(e.trials),
           std::to_string(e.hits), fmt(e.estimate), fmt(e.ci_low), fmt(e.ci_high), e.stopping, std::to_string(e.seed)});
  }
  return t;
}

CsvTable to_csv(const HyperplaneReport& r) {
  CsvTable t{{"epsilon", "integral"}, {}};
  for (const auto& x : r.rows) t.add({fmt(x.epsilon), fmt(x.integral)});
  return t;
}

}  // namespace subwalk
