#pragma once

// Command-line front end: argument handling, experiment orchestration and
// persistence of JSON reports and CSV dumps.
//
// Exit codes: 0 success / consistent, 1 inconsistent, 2 invalid config,
// 3 inconclusive, 4 synthesis or module failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <map>
#include <string>
#include <vector>

#include "assoc_clt/blocking.hpp"
#include "assoc_clt/cltlab.hpp"
#include "assoc_clt/config.hpp"
#include "assoc_clt/covariance.hpp"
#include "assoc_clt/fields.hpp"
#include "assoc_clt/parallel.hpp"
#include "assoc_clt/slowvar.hpp"

namespace assoc_clt {

enum ExitCode : int {
  kExitOk = 0,
  kExitInconsistent = 1,
  kExitInvalidConfig = 2,
  kExitInconclusive = 3,
  kExitModuleFailure = 4,
};

struct CliOptions {
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;  ///< 0: all cores
  std::optional<std::string> out_dir;
  bool profile = false;
};

namespace cli_detail {

inline json to_json(const MultiIndex& m) {
  json a = json::array();
  for (auto v : m) a.push_back(v);
  return a;
}

/// JSON has no NaN/inf; those become null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Profiler {
 public:
  Profiler(bool enabled, std::ostream& err) : enabled_(enabled), err_(err) {}

  template <class F>
  decltype(auto) stage(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Report {
      Profiler& p;
      const std::string& name;
      std::chrono::steady_clock::time_point t0;
      ~Report() {
        if (!p.enabled_) return;
        const std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - t0;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", ms.count());
        p.err_ << "profile: " << name << " " << buf << " ms\n";
      }
    } report{*this, name, t0};
    return f();
  }

 private:
  bool enabled_;
  std::ostream& err_;
};

struct Context {
  CliOptions opts;
  ExperimentConfig cfg;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::ostream& out;
  std::ostream& err;
  Profiler profiler;
  /// CSV files to write next to the report: file name -> content.
  std::vector<std::pair<std::string, std::string>> csv;
};

inline const CovarianceModel& require_model(const Context& ctx, const char* command) {
  if (!ctx.cfg.model) throw ConfigError("model", std::string("required by the ") + command + " command");
  return *ctx.cfg.model;
}

inline const std::vector<MultiIndex>& require_grid(const Context& ctx, const char* command) {
  if (ctx.cfg.n_grid.empty()) throw ConfigError("n_grid", std::string("n_grid or r_grid required by ") + command);
  return ctx.cfg.n_grid;
}

inline const json& require_sampler(const Context& ctx, const char* command) {
  if (!ctx.cfg.sampler) throw ConfigError("sampler", std::string("required by the ") + command + " command");
  return *ctx.cfg.sampler;
}

inline std::string output_name(const Context& ctx, const char* key, const std::string& fallback) {
  if (ctx.cfg.output.contains(key)) return ctx.cfg.output[key].get<std::string>();
  return fallback;
}

inline std::int64_t max_side(const std::vector<MultiIndex>& grid) {
  std::int64_t m = 1;
  for (const auto& n : grid) {
    for (auto v : n) m = std::max(m, v);
  }
  return m;
}

inline int default_cap(std::size_t d) { return d == 1 ? 24 : (d == 2 ? 10 : 6); }

inline BlockingSchedule schedule_for(const Context& ctx, const CovarianceModel& model) {
  ScheduleOptions so;
  so.cap_log2 = ctx.cfg.cap_log2.value_or(default_cap(model.dim()));
  return build_schedule(k_rect_fn(model), so);
}

inline json schedule_json(const BlockingSchedule& s) {
  json j;
  j["r_seq"] = json::array();
  j["n0_seq"] = json::array();
  j["m0_seq"] = json::array();
  for (std::size_t i = 0; i < s.r_seq().size(); ++i) {
    j["r_seq"].push_back(to_json(s.r_seq()[i]));
    j["n0_seq"].push_back(to_json(s.n0_seq()[i]));
    j["m0_seq"].push_back(to_json(s.m0_seq()[i]));
  }
  j["truncated"] = s.stopped_at().has_value();
  return j;
}

inline json plan_json(const BlockingPlan& plan) {
  json j;
  j["n"] = to_json(plan.n);
  j["p"] = to_json(plan.p);
  j["q"] = to_json(plan.q);
  j["m_counts"] = to_json(plan.m_counts);
  j["block_count"] = plan.block_count;
  j["corridor_cardinality"] = plan.corridor_cardinality;
  j["bounds"] = {{"m_lower", plan.m_lower()},
                 {"m_upper", plan.m_upper()},
                 {"corridor_bound", plan.corridor_cardinality_bound()}};
  return j;
}

inline json certificate_json(const Certificate& c) {
  return {{"n", to_json(c.n)},
          {"p", to_json(c.p)},
          {"q", to_json(c.q)},
          {"t", c.t},
          {"q1_bound", number(c.q1_bound)},
          {"q2_bound", number(c.q2_bound)},
          {"lindeberg_sum", number(c.lindeberg_sum)},
          {"lindeberg_std_error", number(c.lindeberg_std_error)},
          {"block_variance_sum", number(c.block_variance_sum)},
          {"epsilon", c.epsilon},
          {"block_count", c.block_count},
          {"corridor_cardinality", c.corridor_cardinality},
          {"replicates", c.replicates}};
}

// ---- commands ---------------------------------------------------------------

inline int cmd_variance(Context& ctx, json& result) {
  const auto& model = require_model(ctx, "variance");
  const auto& grid = require_grid(ctx, "variance");
  json rows = json::array();
  std::string csv = "n,var_exact,n_kx,ratio\n";
  ctx.profiler.stage("variance", [&] {
    for (const auto& n : grid) {
      const double var = variance_exact(model, n);
      const double nk = static_cast<double>(product(n)) * k_rect(model, n);
      rows.push_back({{"n", to_json(n)}, {"var_exact", number(var)}, {"n_kx", number(nk)}, {"ratio", number(var / nk)}});
      csv += "\"" + to_string(n) + "\"," + csv_number(var) + "," + csv_number(nk) + "," + csv_number(var / nk) + "\n";
    }
  });
  result["rows"] = rows;
  ctx.csv.emplace_back(output_name(ctx, "table_csv", "variance.csv"), csv);
  return kExitOk;
}

inline int cmd_kfun(Context& ctx, json& result) {
  const auto& model = require_model(ctx, "kfun");
  const auto& grid = require_grid(ctx, "kfun");
  json rows = json::array();
  ctx.profiler.stage("kfun", [&] {
    for (const auto& n : grid) {
      json row{{"n", to_json(n)}, {"k_rect", number(k_rect(model, n))}};
      if (ctx.cfg.cubes) {
        row["r"] = n[0];
        row["k_ball"] = number(k_ball_euclid(model, n[0]));
        row["r_sup"] = number(k_ball_sup(model, n[0]));
      }
      rows.push_back(row);
    }
  });
  const auto chi = ctx.profiler.stage("susceptibility", [&] { return susceptibility(model); });
  result["rows"] = rows;
  result["susceptibility"] = {{"diverged", chi.diverged},
                              {"value", chi.diverged ? json(nullptr) : number(chi.value)},
                              {"abs_error", chi.diverged ? json(nullptr) : number(chi.abs_error)}};
  return kExitOk;
}

inline int cmd_svcheck(Context& ctx, json& result) {
  const auto& s = ctx.cfg.svcheck;
  if (s.empty()) throw ConfigError("svcheck", "required by the svcheck command");
  const auto fn = s["function"].get<std::string>();
  std::size_t d = s.contains("dimension") ? s["dimension"].get<std::size_t>() : 1;
  if (fn == "k-rect") d = ctx.cfg.model->dim();
  const MultiIndex a = s.contains("a") ? config_detail::get_index(s["a"], "svcheck.a", d) : MultiIndex::filled(d, 2);
  const int from = s.contains("from_log2") ? static_cast<int>(s["from_log2"].get<std::int64_t>()) : 8;
  const int to = s.contains("to_log2") ? static_cast<int>(s["to_log2"].get<std::int64_t>()) : 20;
  const double tol = s.contains("tolerance") ? s["tolerance"].get<double>() : 0.1;

  std::optional<SlowVaryFn> L;
  if (fn == "log") {
    L = log_product_fn(d);
  } else if (fn == "linear") {
    L = SlowVaryFn::continuum(d, [](std::span<const double> x) {
      double v = 1.0;
      for (double xk : x) v *= xk;
      return v;
    });
  } else if (fn == "constant") {
    L = SlowVaryFn::continuum(d, [](std::span<const double>) { return 1.0; });
  } else {
    L = k_rect_fn(*ctx.cfg.model);
    const auto ext = extend_to_continuum(*L, true);
    result["extension"] = "H(x) = L(floor(x v 1)); L nondecreasing on the checked grid";
    (void)ext;
  }
  const auto schedule = dyadic_schedule(d, from, to);
  const auto ratios = ctx.profiler.stage("svcheck", [&] { return sv_ratio_probe(*L, a, schedule); });
  json rows = json::array();
  for (std::size_t i = 0; i < ratios.size(); ++i) rows.push_back({{"x", to_json(schedule[i])}, {"ratio", number(ratios[i])}});
  const double first_gap = std::abs(ratios.front() - 1.0);
  const double final_gap = std::abs(ratios.back() - 1.0);
  const bool converging = final_gap <= tol && final_gap <= first_gap;
  result["function"] = fn;
  result["a"] = to_json(a);
  result["rows"] = rows;
  result["final_ratio"] = number(ratios.back());
  result["tolerance"] = tol;
  result["converging"] = converging;
  std::ostringstream note;
  if (converging) {
    note << "ratios approach 1 along the probed scales (|ratio - 1| = " << final_gap << " at the largest x); "
         << "finite-scale evidence only";
  } else {
    note << "non-convergence: ratio " << ratios.back() << " stays away from 1 at the largest x";
  }
  result["note"] = note.str();
  return kExitOk;
}

inline int cmd_blocking(Context& ctx, json& result) {
  const auto& b = ctx.cfg.blocking;
  if (b.empty()) throw ConfigError("blocking", "required by the blocking command");
  const MultiIndex n = config_detail::get_index(b["n"], "blocking.n");
  MultiIndex p, q;
  if (b.contains("p")) {
    p = config_detail::get_index(b["p"], "blocking.p");
    q = config_detail::get_index(b["q"], "blocking.q");
  } else {
    const auto& model = require_model(ctx, "blocking (without explicit p and q)");
    const auto schedule = ctx.profiler.stage("schedule", [&] { return schedule_for(ctx, model); });
    q = schedule.q_of(n);
    p = choose_p(n, q);
    result["schedule"] = schedule_json(schedule);
  }
  const auto plan = ctx.profiler.stage("partition", [&] { return partition(n, p, q); });
  result["plan"] = plan_json(plan);
  if (ctx.cfg.model) {
    const auto cb = ctx.profiler.stage("corridor", [&] { return corridor_variance_bound(plan, *ctx.cfg.model); });
    result["corridor_variance"] = {{"exact", number(cb.exact)},
                                   {"bound", number(cb.bound)},
                                   {"ratio_to_total", number(cb.ratio_to_total)},
                                   {"holds", cb.holds}};
  }
  return kExitOk;
}

inline int cmd_simulate(Context& ctx, json& result) {
  const auto& desc = require_sampler(ctx, "simulate");
  if (!ctx.cfg.box) throw ConfigError("box", "required by the simulate command");
  const MultiIndex& extent = *ctx.cfg.box;
  const auto sampler = ctx.profiler.stage("synthesis", [&] { return build_sampler(desc, max_side({extent})); });
  const auto real = ctx.profiler.stage("sample", [&] { return sampler.sample(Box::from_extent(extent), ctx.seed); });
  CompensatedSum s, s2;
  for (double v : real.values) {
    s += v;
    s2 += static_cast<long double>(v) * v;
  }
  const auto count = static_cast<double>(real.values.size());
  const double mean = static_cast<double>(s.value()) / count;
  result["sampler"] = sampler.id();
  result["box"] = to_json(extent);
  result["count"] = real.values.size();
  result["sum"] = number(static_cast<double>(s.value()));
  result["mean"] = number(mean);
  result["variance"] = number(static_cast<double>(s2.value()) / count - mean * mean);
  std::string csv;
  for (std::size_t k = 0; k < extent.dim(); ++k) csv += "t" + std::to_string(k + 1) + ",";
  csv += "value\n";
  std::size_t i = 0;
  for_each_point(real.box, [&](const MultiIndex& t) {
    for (auto c : t) csv += std::to_string(c) + ",";
    csv += csv_number(real.values[i++]) + "\n";
  });
  const auto name = output_name(ctx, "realization_csv", "realization.csv");
  result["realization_csv"] = ctx.opts.out_dir ? json(name) : json(nullptr);
  ctx.csv.emplace_back(name, std::move(csv));
  return kExitOk;
}

inline int cmd_certify(Context& ctx, json& result) {
  const auto& desc = require_sampler(ctx, "certify");
  const auto& grid = require_grid(ctx, "certify");
  const auto sampler = ctx.profiler.stage("synthesis", [&] { return build_sampler(desc, max_side(grid)); });
  const auto schedule = ctx.profiler.stage("schedule", [&] { return schedule_for(ctx, sampler.model()); });
  const auto& c = ctx.cfg.certificate;
  const double t = c.contains("t") ? c["t"].get<double>() : 1.0;
  CertificateOptions co;
  co.epsilon = c.contains("epsilon") ? c["epsilon"].get<double>() : 0.1;
  co.run = RunOptions{ctx.cfg.replicates, ctx.seed, ctx.threads};
  json rows = json::array();
  ctx.profiler.stage("certificates", [&] {
    for (const auto& n : grid) {
      const auto q = schedule.q_of(n);
      const auto plan = partition(n, choose_p(n, q), q);
      auto row = certificate_json(q_certificate(sampler, plan, NormalizationSpec(NormalizationMode::k_rect), t, co));
      const auto cb = corridor_variance_bound(plan, sampler.model());
      row["corridor_variance"] = {{"exact", number(cb.exact)}, {"bound", number(cb.bound)}, {"holds", cb.holds}};
      rows.push_back(row);
    }
  });
  result["sampler"] = sampler.id();
  result["schedule"] = schedule_json(schedule);
  result["certificates"] = rows;
  return kExitOk;
}

inline int cmd_clt(Context& ctx, json& result) {
  const auto& desc = require_sampler(ctx, "clt");
  const auto& grid = require_grid(ctx, "clt");
  const auto sampler = ctx.profiler.stage("synthesis", [&] { return build_sampler(desc, max_side(grid)); });

  CltOptions co;
  co.mode = ctx.cfg.normalization.value_or(NormalizationMode::exact_variance);
  co.run = RunOptions{ctx.cfg.replicates, ctx.seed, ctx.threads};
  if (ctx.cfg.t_grid) co.t_grid = *ctx.cfg.t_grid;
  if (ctx.cfg.c_grid) co.c_grid = *ctx.cfg.c_grid;
  co.thresholds = ctx.cfg.thresholds;
  const auto& c = ctx.cfg.certificate;
  co.certificate_t = c.contains("t") ? c["t"].get<double>() : 1.0;
  co.lindeberg_epsilon = c.contains("epsilon") ? c["epsilon"].get<double>() : 0.1;

  std::optional<BlockingSchedule> schedule;
  std::optional<std::string> note;
  const bool want_certificate = c.contains("enabled") ? c["enabled"].get<bool>() : false;
  if (want_certificate) {
    if (ctx.cfg.cubes) {
      note = "certificate skipped: cube grids use the Euclidean K normalization, the certificate needs K_X";
    } else {
      try {
        schedule = ctx.profiler.stage("schedule", [&] { return schedule_for(ctx, sampler.model()); });
        co.schedule = &*schedule;
      } catch (const std::runtime_error& e) {
        note = std::string("certificate skipped: ") + e.what();
      }
    }
  }
  auto rep = ctx.profiler.stage("monte-carlo", [&] { return run_clt(sampler, grid, co); });
  if (note) rep.certificate_note = note;
  const auto verdict = theorem_verdict(rep, co.thresholds);

  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"n", to_json(r.n)},
                    {"v_n", number(r.v_n)},
                    {"target_variance", number(r.target_variance)},
                    {"sample_variance", number(r.sample_variance)},
                    {"ks", number(r.ks)},
                    {"ks_threshold", number(r.ks_threshold)},
                    {"ks_pass", r.ks_pass},
                    {"cf", number(r.cf)},
                    {"cf_threshold", number(r.cf_threshold)},
                    {"cf_pass", r.cf_pass}});
  }
  json ui;
  ui["c_grid"] = rep.ui.c_grid;
  ui["rows"] = json::array();
  for (std::size_t i = 0; i < rep.ui.tails.size(); ++i) {
    ui["rows"].push_back(
        {{"n", to_json(rep.ui.n_grid[i])}, {"tails", rep.ui.tails[i]}, {"std_errors", rep.ui.std_errors[i]}});
  }
  ui["sup_over_n"] = rep.ui.sup_over_n;
  ui["note"] = "finite-grid projection of uniform integrability; not a proof of it";
  json certs = json::array();
  for (const auto& cert : rep.certificates) certs.push_back(certificate_json(cert));

  result["sampler"] = rep.sampler_id;
  result["normalization"] = to_string(rep.mode);
  result["replicates"] = rep.replicates;
  result["t_grid"] = rep.t_grid;
  result["normality"] = rows;
  result["ui_table"] = ui;
  result["certificates"] = certs;
  result["certificate_note"] = rep.certificate_note ? json(*rep.certificate_note) : json(nullptr);
  result["verdict"] = {{"outcome", to_string(verdict.outcome)}, {"text", verdict.text}, {"reasons", verdict.reasons}};

  std::string csv = "y\n";
  for (double y : rep.normalized_samples) csv += csv_number(y) + "\n";
  ctx.csv.emplace_back(output_name(ctx, "samples_csv", "samples.csv"), std::move(csv));

  switch (verdict.outcome) {
    case Outcome::consistent_with_clt: return kExitOk;
    case Outcome::inconsistent: return kExitInconsistent;
    case Outcome::inconclusive: return kExitInconclusive;
  }
  return kExitInconclusive;
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
  }
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

}  // namespace cli_detail

inline const std::vector<std::string>& cli_commands() {
  static const std::vector<std::string> cmds{"variance", "kfun", "svcheck", "blocking", "simulate", "clt", "certify"};
  return cmds;
}

/// Checks that a report carries a supported schema version and a config that validates.
inline void validate_report(const json& report) {
  config_detail::check_keys(report, "report",
                            {"schema_version", "command", "generated_at", "seed", "config", "result", "exit_code"});
  if (!report.contains("schema_version") || report["schema_version"] != kSchemaVersion) {
    throw ConfigError("report.schema_version", "unsupported or missing");
  }
  if (!report.contains("config")) throw ConfigError("report.config", "missing");
  (void)parse_config(report["config"]);
}

/// Runs one command; the report JSON goes to `out` and, with --out, to DIR/<command>.json.
inline int run_command(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  try {
    const json raw = load_json(opts.config_path);
    ExperimentConfig cfg = parse_config(raw);
    std::uint64_t seed = cfg.seed;
    if (const char* env = std::getenv("ASSOC_CLT_SEED"); env != nullptr && *env != '\0') {
      try {
        std::size_t used = 0;
        seed = std::stoull(env, &used, 0);
        if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ConfigError("ASSOC_CLT_SEED", "not an unsigned 64-bit integer");
      }
    }
    if (opts.seed) seed = *opts.seed;
    Context ctx{opts, std::move(cfg), seed, opts.threads == 0 ? default_threads() : opts.threads, out, err,
                Profiler(opts.profile, err), {}};
    json result = json::object();
    int code = kExitOk;
    if (opts.command == "variance") code = cmd_variance(ctx, result);
    else if (opts.command == "kfun") code = cmd_kfun(ctx, result);
    else if (opts.command == "svcheck") code = cmd_svcheck(ctx, result);
    else if (opts.command == "blocking") code = cmd_blocking(ctx, result);
    else if (opts.command == "simulate") code = cmd_simulate(ctx, result);
    else if (opts.command == "certify") code = cmd_certify(ctx, result);
    else if (opts.command == "clt") code = cmd_clt(ctx, result);
    else throw ConfigError("command", "unknown command " + opts.command);

    json report;
    report["schema_version"] = kSchemaVersion;
    report["command"] = opts.command;
    report["generated_at"] = utc_timestamp();
    report["seed"] = seed;
    report["config"] = raw;
    report["result"] = std::move(result);
    report["exit_code"] = code;
    const std::string text = report.dump(2) + "\n";
    ctx.profiler.stage("write", [&] {
      if (opts.out_dir) {
        const std::filesystem::path dir(*opts.out_dir);
        std::filesystem::create_directories(dir);
        write_file(dir / output_name(ctx, "report", opts.command + ".json"), text);
        for (const auto& [name, content] : ctx.csv) write_file(dir / name, content);
      }
    });
    out << text;
    return code;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const SynthesisError& e) {
    err << "error: sampler synthesis failed: " << e.what() << "\n";
    return kExitModuleFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitModuleFailure;
  }
}

/// Parses argv-style arguments (without the program name) and runs the command.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Central limit experiments for positively associated random fields"};
  app.require_subcommand(1);
  CliOptions opts;
  std::uint64_t seed = 0;
  static const std::map<std::string, std::string> help{
      {"variance", "exact variance of box sums and the <n> K_X(n) ratio"},
      {"kfun", "K_X(n), ball sums and the susceptibility"},
      {"svcheck", "slow-variation ratio probe along a dyadic schedule"},
      {"blocking", "blocking plan, corridor cardinality and variance bound"},
      {"simulate", "one realization of the configured field"},
      {"clt", "Monte Carlo normality and tail diagnostics with a verdict"},
      {"certify", "characteristic-function certificate along n_grid"}};
  for (const auto& name : cli_commands()) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "seed; overrides ASSOC_CLT_SEED and the config");
    sub->add_option("--threads", opts.threads, "worker threads (default: all cores)")->check(CLI::PositiveNumber);
    sub->add_option("--out", opts.out_dir, "directory for the JSON report and CSV dumps");
    sub->add_flag("--profile", opts.profile, "print wall time per stage to stderr");
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  }
  const auto* sub = app.get_subcommands().front();
  opts.command = sub->get_name();
  if (sub->count("--seed") > 0) opts.seed = seed;
  return run_command(opts, out, err);
}

}  // namespace assoc_clt
