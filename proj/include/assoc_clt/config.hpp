#pragma once

// JSON experiment configuration: schema validation and construction of the
// domain objects (covariance models, samplers, grids) it describes.
//
// Every object is checked against a closed key set; any unknown key or wrong
// type raises ConfigError naming the offending field path.

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "assoc_clt/cltlab.hpp"
#include "assoc_clt/covariance.hpp"
#include "assoc_clt/fields.hpp"
#include "assoc_clt/lattice.hpp"

namespace assoc_clt {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error("config field '" + field + "': " + what), field_(field) {}
  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

namespace config_detail {

inline void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.contains(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

inline std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError(join_path(path, key), "missing required key");
  return obj.at(key);
}

inline double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

inline std::int64_t get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<std::int64_t>();
}

inline std::uint64_t get_u64(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(path, "expected a nonnegative integer");
}

inline std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

inline std::size_t get_dimension(const json& v, const std::string& path) {
  const auto d = get_int(v, path);
  if (d < 1 || d > 4) throw ConfigError(path, "dimension must lie in 1..4");
  return static_cast<std::size_t>(d);
}

inline MultiIndex get_index(const json& v, const std::string& path, std::optional<std::size_t> dim = std::nullopt) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a nonempty integer array");
  std::vector<MultiIndex::value_type> c;
  for (std::size_t i = 0; i < v.size(); ++i) c.push_back(get_int(v[i], path + "[" + std::to_string(i) + "]"));
  if (dim && c.size() != *dim) throw ConfigError(path, "expected " + std::to_string(*dim) + " coordinates");
  return MultiIndex(std::move(c));
}

inline std::vector<double> get_reals(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

/// [[m_1, ..., m_d, value], ...]
inline std::vector<std::pair<MultiIndex, double>> get_entries(const json& v, const std::string& path, std::size_t d) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a nonempty array of [m..., value] rows");
  std::vector<std::pair<MultiIndex, double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto row_path = path + "[" + std::to_string(i) + "]";
    const auto& row = v[i];
    if (!row.is_array() || row.size() != d + 1) {
      throw ConfigError(row_path, "expected " + std::to_string(d) + " integer coordinates followed by a value");
    }
    std::vector<MultiIndex::value_type> m;
    for (std::size_t k = 0; k < d; ++k) m.push_back(get_int(row[k], row_path + "[" + std::to_string(k) + "]"));
    out.emplace_back(MultiIndex(std::move(m)), get_number(row[d], row_path + "[" + std::to_string(d) + "]"));
  }
  return out;
}

}  // namespace config_detail

/// {"kind": "finite", "dimension": d, "entries": [[m..., value]...]} or
/// {"kind": "radial", "dimension": d, "profile": "power", "alpha": a, "scale": c0}.
///
/// Schema problems raise ConfigError; a negative covariance or R(0) <= 0 raises
/// std::domain_error from the model itself.
[[nodiscard]] inline CovarianceModel parse_model(const json& j, const std::string& path = "model") {
  using namespace config_detail;
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  const auto kind = get_string(require(j, path, "kind"), join_path(path, "kind"));
  if (kind == "finite") {
    check_keys(j, path, {"kind", "dimension", "entries"});
    const auto d = get_dimension(require(j, path, "dimension"), join_path(path, "dimension"));
    const auto entries = get_entries(require(j, path, "entries"), join_path(path, "entries"), d);
    try {
      return CovarianceModel::finite(d, entries);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(join_path(path, "entries"), e.what());
    }
  }
  if (kind == "radial") {
    check_keys(j, path, {"kind", "dimension", "profile", "alpha", "scale"});
    const auto d = get_dimension(require(j, path, "dimension"), join_path(path, "dimension"));
    const auto profile = j.contains("profile") ? get_string(j["profile"], join_path(path, "profile")) : "power";
    if (profile != "power") throw ConfigError(join_path(path, "profile"), "only \"power\" is supported");
    const double alpha = get_number(require(j, path, "alpha"), join_path(path, "alpha"));
    const double scale = j.contains("scale") ? get_number(j["scale"], join_path(path, "scale")) : 1.0;
    if (alpha < 0.0) throw ConfigError(join_path(path, "alpha"), "must be >= 0");
    return CovarianceModel::radial_power(d, alpha, scale);
  }
  throw ConfigError(join_path(path, "kind"), "expected \"finite\" or \"radial\"");
}

struct SamplerConfig {
  json descriptor;
  std::optional<std::uint64_t> seed;
};

inline MarginalLaw parse_law(const json& j, const std::string& path) {
  const auto s = config_detail::get_string(j, path);
  if (s == "normal") return MarginalLaw::normal;
  if (s == "bounded-uniform") return MarginalLaw::bounded_uniform;
  throw ConfigError(path, "expected \"normal\" or \"bounded-uniform\"");
}

/// Checks a sampler descriptor without synthesizing it.
inline void validate_sampler(const json& j, const std::string& path = "sampler") {
  using namespace config_detail;
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  const auto kind = get_string(require(j, path, "kind"), join_path(path, "kind"));
  if (kind == "iid") {
    check_keys(j, path, {"kind", "dimension", "variance", "law", "seed"});
    (void)get_dimension(require(j, path, "dimension"), join_path(path, "dimension"));
    (void)get_number(require(j, path, "variance"), join_path(path, "variance"));
    if (j.contains("law")) (void)parse_law(j["law"], join_path(path, "law"));
  } else if (kind == "ma") {
    check_keys(j, path, {"kind", "dimension", "kernel", "noise_variance", "law", "seed"});
    const auto d = get_dimension(require(j, path, "dimension"), join_path(path, "dimension"));
    (void)get_entries(require(j, path, "kernel"), join_path(path, "kernel"), d);
    if (j.contains("noise_variance")) (void)get_number(j["noise_variance"], join_path(path, "noise_variance"));
    if (j.contains("law")) (void)parse_law(j["law"], join_path(path, "law"));
  } else if (kind == "gaussian") {
    check_keys(j, path, {"kind", "model", "torus", "mean", "seed"});
    const auto& m = require(j, path, "model");
    if (!m.is_object()) throw ConfigError(join_path(path, "model"), "expected an object");
    const auto d = get_dimension(require(m, join_path(path, "model"), "dimension"), join_path(path, "model.dimension"));
    if (j.contains("torus")) (void)get_index(j["torus"], join_path(path, "torus"), d);
    if (j.contains("mean")) (void)get_number(j["mean"], join_path(path, "mean"));
  } else if (kind == "constant") {
    check_keys(j, path, {"kind", "dimension", "variance", "seed"});
    (void)get_dimension(require(j, path, "dimension"), join_path(path, "dimension"));
    (void)get_number(require(j, path, "variance"), join_path(path, "variance"));
  } else {
    throw ConfigError(join_path(path, "kind"), "expected \"iid\", \"ma\", \"gaussian\" or \"constant\"");
  }
  if (j.contains("seed")) (void)get_u64(j["seed"], join_path(path, "seed"));
}

[[nodiscard]] inline std::size_t sampler_dimension(const json& j) {
  if (j.at("kind") == "gaussian") return j.at("model").at("dimension").get<std::size_t>();
  return j.at("dimension").get<std::size_t>();
}

/// Builds a validated sampler. `max_side` sizes the default Gaussian torus:
/// the next power of two >= 4 * max_side along every axis.
[[nodiscard]] inline FieldSampler build_sampler(const json& j, std::int64_t max_side, const std::string& path = "sampler") {
  using namespace config_detail;
  validate_sampler(j, path);
  const auto kind = j.at("kind").get<std::string>();
  const auto law = j.contains("law") ? parse_law(j["law"], join_path(path, "law")) : MarginalLaw::normal;
  if (kind == "iid") {
    return make_iid(get_dimension(j["dimension"], ""), get_number(j["variance"], ""), law);
  }
  if (kind == "ma") {
    const auto d = get_dimension(j["dimension"], "");
    const auto kernel = get_entries(j["kernel"], join_path(path, "kernel"), d);
    const double nv = j.contains("noise_variance") ? get_number(j["noise_variance"], "") : 1.0;
    return make_moving_average(d, kernel, nv, law);
  }
  if (kind == "constant") {
    return make_constant_field(get_dimension(j["dimension"], ""), get_number(j["variance"], ""));
  }
  const auto model = parse_model(j["model"], join_path(path, "model"));
  const auto d = model.dim();
  MultiIndex torus = MultiIndex::zeros(d);
  if (j.contains("torus")) {
    torus = get_index(j["torus"], join_path(path, "torus"), d);
    for (std::size_t k = 0; k < d; ++k) {
      if (torus[k] < 4 * max_side) {
        throw std::domain_error("gaussian torus extent " + std::to_string(torus[k]) + " is below 4x the largest box side " +
                                std::to_string(max_side));
      }
    }
  } else {
    std::int64_t m = 2;
    while (m < 4 * max_side) m *= 2;
    torus = MultiIndex::filled(d, m);
  }
  const double mean = j.contains("mean") ? get_number(j["mean"], "") : 0.0;
  return make_gaussian(model, torus, mean);
}

/// Experiment configuration shared by all commands; which keys are required
/// depends on the command.
struct ExperimentConfig {
  json raw;
  std::optional<CovarianceModel> model;
  std::optional<json> sampler;
  std::vector<MultiIndex> n_grid;
  bool cubes = false;  ///< grid came from "r_grid"
  std::optional<NormalizationMode> normalization;
  std::int64_t replicates = 1000;
  std::uint64_t seed = 0;
  VerdictThresholds thresholds;
  std::optional<std::vector<double>> t_grid;
  std::optional<std::vector<double>> c_grid;
  json certificate = json::object();
  json blocking = json::object();
  json svcheck = json::object();
  json output = json::object();
  std::optional<MultiIndex> box;
  std::optional<int> cap_log2;
};

/// Schema validation of the whole document. Domain errors from model
/// construction (negative covariance) propagate as std::domain_error.
[[nodiscard]] inline ExperimentConfig parse_config(const json& j) {
  using namespace config_detail;
  check_keys(j, "", {"schema_version", "model", "sampler", "n_grid", "r_grid", "normalization", "replicates", "seed",
                     "thresholds", "t_grid", "c_grid", "certificate", "blocking", "svcheck", "output", "box",
                     "cap_log2", "description"});
  ExperimentConfig cfg;
  cfg.raw = j;
  if (j.contains("schema_version")) {
    if (get_int(j["schema_version"], "schema_version") != kSchemaVersion) {
      throw ConfigError("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
    }
  }
  if (j.contains("description")) (void)get_string(j["description"], "description");
  if (j.contains("sampler")) {
    validate_sampler(j["sampler"]);
    cfg.sampler = j["sampler"];
    if (j["sampler"].contains("seed")) cfg.seed = get_u64(j["sampler"]["seed"], "sampler.seed");
  }
  if (j.contains("seed")) {
    const auto top = get_u64(j["seed"], "seed");
    if (cfg.sampler && (*cfg.sampler).contains("seed") && cfg.seed != top) {
      throw ConfigError("seed", "disagrees with sampler.seed");
    }
    cfg.seed = top;
  }
  if (j.contains("model")) cfg.model = parse_model(j["model"]);
  if (j.contains("n_grid") && j.contains("r_grid")) throw ConfigError("r_grid", "give either n_grid or r_grid");
  std::optional<std::size_t> dim;
  if (cfg.model) dim = cfg.model->dim();
  else if (cfg.sampler) dim = sampler_dimension(*cfg.sampler);
  if (j.contains("n_grid")) {
    const auto& g = j["n_grid"];
    if (!g.is_array() || g.empty()) throw ConfigError("n_grid", "expected a nonempty array of multi-indices");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto path = "n_grid[" + std::to_string(i) + "]";
      auto n = get_index(g[i], path, dim);
      for (auto v : n) {
        if (v < 1) throw ConfigError(path, "coordinates must be >= 1");
      }
      cfg.n_grid.push_back(std::move(n));
    }
  }
  if (j.contains("r_grid")) {
    const auto& g = j["r_grid"];
    if (!g.is_array() || g.empty()) throw ConfigError("r_grid", "expected a nonempty array of radii");
    if (!dim) throw ConfigError("r_grid", "needs a model or sampler to fix the dimension");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto r = get_int(g[i], "r_grid[" + std::to_string(i) + "]");
      if (r < 1) throw ConfigError("r_grid[" + std::to_string(i) + "]", "radius must be >= 1");
      cfg.n_grid.push_back(MultiIndex::filled(*dim, r));
    }
    cfg.cubes = true;
  }
  if (j.contains("normalization")) {
    const auto s = get_string(j["normalization"], "normalization");
    if (s == "exact-variance") cfg.normalization = NormalizationMode::exact_variance;
    else if (s == "k-normalization") cfg.normalization = cfg.cubes ? NormalizationMode::k_ball : NormalizationMode::k_rect;
    else throw ConfigError("normalization", "expected \"exact-variance\" or \"k-normalization\"");
  }
  if (j.contains("replicates")) {
    cfg.replicates = get_int(j["replicates"], "replicates");
    if (cfg.replicates < 2) throw ConfigError("replicates", "must be >= 2");
  }
  if (j.contains("thresholds")) {
    const auto& t = j["thresholds"];
    check_keys(t, "thresholds", {"ks_coeff", "ks_slack", "cf_max", "ui_tail_max", "ui_flat_tol"});
    auto set = [&](const char* key, double& dst) {
      if (t.contains(key)) dst = get_number(t[key], std::string("thresholds.") + key);
    };
    set("ks_coeff", cfg.thresholds.ks_coeff);
    set("ks_slack", cfg.thresholds.ks_slack);
    set("cf_max", cfg.thresholds.cf_max);
    set("ui_tail_max", cfg.thresholds.ui_tail_max);
    set("ui_flat_tol", cfg.thresholds.ui_flat_tol);
  }
  if (j.contains("t_grid")) cfg.t_grid = get_reals(j["t_grid"], "t_grid");
  if (j.contains("c_grid")) cfg.c_grid = get_reals(j["c_grid"], "c_grid");
  if (j.contains("certificate")) {
    check_keys(j["certificate"], "certificate", {"enabled", "t", "epsilon"});
    const auto& c = j["certificate"];
    if (c.contains("enabled") && !c["enabled"].is_boolean()) throw ConfigError("certificate.enabled", "expected a boolean");
    if (c.contains("t")) (void)get_number(c["t"], "certificate.t");
    if (c.contains("epsilon") && get_number(c["epsilon"], "certificate.epsilon") <= 0.0) {
      throw ConfigError("certificate.epsilon", "must be > 0");
    }
    cfg.certificate = c;
  }
  if (j.contains("cap_log2")) {
    const auto cap = get_int(j["cap_log2"], "cap_log2");
    if (cap < 1 || cap > 40) throw ConfigError("cap_log2", "must lie in 1..40");
    cfg.cap_log2 = static_cast<int>(cap);
  }
  if (j.contains("blocking")) {
    const auto& b = j["blocking"];
    check_keys(b, "blocking", {"n", "p", "q"});
    const auto n = get_index(require(b, "blocking", "n"), "blocking.n", dim);
    if (b.contains("p") != b.contains("q")) throw ConfigError("blocking", "give both p and q, or neither");
    if (b.contains("p")) {
      (void)get_index(b["p"], "blocking.p", n.dim());
      (void)get_index(b["q"], "blocking.q", n.dim());
    }
    cfg.blocking = b;
  }
  if (j.contains("svcheck")) {
    const auto& s = j["svcheck"];
    check_keys(s, "svcheck", {"function", "dimension", "a", "from_log2", "to_log2", "tolerance"});
    const auto fn = get_string(require(s, "svcheck", "function"), "svcheck.function");
    static const std::set<std::string> known{"log", "linear", "constant", "k-rect"};
    if (!known.contains(fn)) throw ConfigError("svcheck.function", "expected log, linear, constant or k-rect");
    if (fn == "k-rect" && !cfg.model) throw ConfigError("model", "svcheck function k-rect needs a model");
    if (s.contains("dimension")) (void)get_dimension(s["dimension"], "svcheck.dimension");
    if (s.contains("a")) (void)get_index(s["a"], "svcheck.a");
    if (s.contains("from_log2")) (void)get_int(s["from_log2"], "svcheck.from_log2");
    if (s.contains("to_log2")) (void)get_int(s["to_log2"], "svcheck.to_log2");
    if (s.contains("tolerance")) (void)get_number(s["tolerance"], "svcheck.tolerance");
    cfg.svcheck = s;
  }
  if (j.contains("output")) {
    check_keys(j["output"], "output", {"report", "samples_csv", "table_csv", "realization_csv"});
    for (const auto& [k, v] : j["output"].items()) (void)get_string(v, "output." + k);
    cfg.output = j["output"];
  }
  if (j.contains("box")) {
    auto b = get_index(j["box"], "box", dim);
    for (auto v : b) {
      if (v < 1) throw ConfigError("box", "extent must be >= 1");
    }
    cfg.box = std::move(b);
  }
  return cfg;
}

}  // namespace assoc_clt
