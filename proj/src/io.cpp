#include "hetnet/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hetnet/errors.hpp"

namespace hetnet {

using nlohmann::json;

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("invalid experiment config: " + field + " " + why);
  };
  if (realizations == 0) fail("realizations", "must be positive");
  if (k_step == 0) fail("k_step", "must be positive");
  if (delay_k_step == 0) fail("delay_k_step", "must be positive");
  if (lambda_factors.empty()) fail("lambda_factors", "must not be empty");
  for (const double f : lambda_factors)
    if (!(f > 0.0)) fail("lambda_factors", "must be positive");
  if (!(epsilon > 0.0)) fail("epsilon", "must be positive");
  if (!(relaxation_tol > 0.0)) fail("relaxation_tol", "must be positive");
}

namespace {

std::string_view traffic_name(TrafficKind k) { return k == TrafficKind::hotspot ? "hotspot" : "homogeneous"; }

/// Reads the keys of one JSON object, rejecting unknown ones.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!it->is_number()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_unsigned()) throw ConfigError("");
      }
      out = it->template get<T>();
    } catch (const std::exception&) {
      throw ConfigError(path_ + "." + key + " has the wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError("unknown key " + path_ + "." + item.key());
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

json to_json(const ScenarioConfig& c) {
  json traffic = {{"kind", traffic_name(c.traffic.kind)}};
  if (c.traffic.kind == TrafficKind::hotspot) {
    traffic["side_m"] = c.traffic.hotspot_side_m;
    traffic["small_index"] = c.traffic.hotspot_small_index;
    traffic["weight_inside"] = c.traffic.weight_inside;
    traffic["weight_outside"] = c.traffic.weight_outside;
  }
  return {{"macro_count", c.macro_count},
          {"small_cells_per_macro", c.small_cells_per_macro},
          {"inter_site_distance", c.inter_site_distance},
          {"sc_distance_from_center", c.sc_distance_from_center},
          {"sc_azimuth_offset_deg", c.sc_azimuth_offset_deg},
          {"locations_per_cell", c.locations_per_cell},
          {"shadowing_std", c.shadowing_std},
          {"penetration_loss", c.penetration_loss},
          {"antenna_gain_ue", c.antenna_gain_ue},
          {"antenna_gain_bs", c.antenna_gain_bs},
          {"noise_psd", c.noise_psd},
          {"subchannel_bandwidth", c.subchannel_bandwidth},
          {"total_subchannels_per_macro", c.total_subchannels_per_macro},
          {"reuse_factor", c.reuse_factor},
          {"p_macro", c.p_macro},
          {"p_small", c.p_small},
          {"mean_file_size", c.mean_file_size},
          {"rho_bar", c.rho_bar},
          {"traffic", traffic},
          {"seed", c.seed}};
}

json to_json(const ExperimentConfig& c) {
  return {{"realizations", c.realizations}, {"k_step", c.k_step},
          {"delay_k_step", c.delay_k_step}, {"lambda_factors", c.lambda_factors},
          {"epsilon", c.epsilon},           {"relaxation_tol", c.relaxation_tol},
          {"max_nodes", c.max_nodes},       {"delay_max_nodes", c.delay_max_nodes},
          {"workers", c.workers}};
}

json to_json(const RunConfig& c) { return {{"scenario", to_json(c.scenario)}, {"experiment", to_json(c.experiment)}}; }

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig c;
  ObjectReader r(j, "scenario");
  r.get("macro_count", c.macro_count);
  r.get("small_cells_per_macro", c.small_cells_per_macro);
  r.get("inter_site_distance", c.inter_site_distance);
  r.get("sc_distance_from_center", c.sc_distance_from_center);
  r.get("sc_azimuth_offset_deg", c.sc_azimuth_offset_deg);
  r.get("locations_per_cell", c.locations_per_cell);
  r.get("shadowing_std", c.shadowing_std);
  r.get("penetration_loss", c.penetration_loss);
  r.get("antenna_gain_ue", c.antenna_gain_ue);
  r.get("antenna_gain_bs", c.antenna_gain_bs);
  r.get("noise_psd", c.noise_psd);
  r.get("subchannel_bandwidth", c.subchannel_bandwidth);
  r.get("total_subchannels_per_macro", c.total_subchannels_per_macro);
  r.get("reuse_factor", c.reuse_factor);
  r.get("p_macro", c.p_macro);
  r.get("p_small", c.p_small);
  r.get("mean_file_size", c.mean_file_size);
  r.get("rho_bar", c.rho_bar);
  r.get("seed", c.seed);
  if (const json* t = r.child("traffic")) {
    ObjectReader tr(*t, "scenario.traffic");
    std::string kind = "homogeneous";
    tr.get("kind", kind);
    if (kind == "homogeneous") {
      c.traffic.kind = TrafficKind::homogeneous;
    } else if (kind == "hotspot") {
      c.traffic.kind = TrafficKind::hotspot;
      tr.get("side_m", c.traffic.hotspot_side_m);
      tr.get("small_index", c.traffic.hotspot_small_index);
      tr.get("weight_inside", c.traffic.weight_inside);
      tr.get("weight_outside", c.traffic.weight_outside);
    } else {
      throw ConfigError("scenario.traffic.kind must be homogeneous or hotspot");
    }
    tr.finish();
  }
  r.finish();
  c.validate();
  return c;
}

ExperimentConfig experiment_from_json(const json& j) {
  ExperimentConfig c;
  ObjectReader r(j, "experiment");
  r.get("realizations", c.realizations);
  r.get("k_step", c.k_step);
  r.get("delay_k_step", c.delay_k_step);
  if (const json* f = r.child("lambda_factors")) {
    if (!f->is_array()) throw ConfigError("experiment.lambda_factors must be an array");
    c.lambda_factors.clear();
    for (const auto& v : *f) {
      if (!v.is_number()) throw ConfigError("experiment.lambda_factors must hold numbers");
      c.lambda_factors.push_back(v.get<double>());
    }
  }
  r.get("epsilon", c.epsilon);
  r.get("relaxation_tol", c.relaxation_tol);
  r.get("max_nodes", c.max_nodes);
  r.get("delay_max_nodes", c.delay_max_nodes);
  r.get("workers", c.workers);
  r.finish();
  c.validate();
  return c;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  ObjectReader r(j, "config");
  if (const json* s = r.child("scenario")) c.scenario = scenario_from_json(*s);
  if (const json* e = r.child("experiment")) c.experiment = experiment_from_json(*e);
  r.finish();
  return c;
}

RunConfig parse_run_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return run_config_from_json(j);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string config_hash(const RunConfig& c) {
  const std::string text = to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static constexpr char kHex[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = kHex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (const char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_escape(fields[i]);
  }
  out_ << "\r\n";
}

namespace {

std::string opt_size(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : ""; }
std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  CsvWriter w(out);
  w.row({"ra", "k", "rule", "beta", "lambda", "metric_name", "value", "bound", "certificate", "iterations", "seed"});
  for (const auto& r : rows) {
    w.row({r.ra, opt_size(r.k), r.rule, opt_double(r.beta), opt_double(r.lambda), r.metric,
           r.ok ? format_double(r.value) : "", opt_double(r.bound), r.certificate, std::to_string(r.iterations),
           std::to_string(r.seed)});
  }
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& points) {
  CsvWriter w(out);
  w.row({"ra", "k", "rule", "beta", "lambda", "metric_name", "mean", "samples", "failures"});
  for (const auto& p : points) {
    w.row({p.ra, opt_size(p.k), p.rule, opt_double(p.beta), opt_double(p.lambda), p.metric, format_double(p.mean),
           std::to_string(p.samples), std::to_string(p.failures)});
  }
}

}  // namespace hetnet
