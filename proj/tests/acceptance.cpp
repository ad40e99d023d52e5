// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 only if
// every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "assoc_clt/blocking.hpp"
#include "assoc_clt/cli.hpp"
#include "assoc_clt/cltlab.hpp"
#include "assoc_clt/covariance.hpp"
#include "assoc_clt/fields.hpp"

using namespace assoc_clt;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

CovarianceModel harmonic() { return CovarianceModel::radial_power(1, 1.0, 1.0); }
CovarianceModel ma1_model() { return CovarianceModel::finite(1, {{MultiIndex{0}, 2.0}, {MultiIndex{1}, 1.0}}); }
FieldSampler ma1_sampler() { return make_moving_average(1, {{MultiIndex{0}, 1.0}, {MultiIndex{1}, 1.0}}, 1.0); }

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

CovarianceModel random_finite_model(std::mt19937_64& rng, std::size_t d, std::int64_t radius) {
  std::uniform_real_distribution<double> val(0.0, 1.0);
  std::bernoulli_distribution keep(0.6);
  std::vector<CovarianceModel::Entry> e{{MultiIndex::zeros(d), 1.0 + val(rng)}};
  for_each_point(Box(MultiIndex::filled(d, -radius - 1), MultiIndex::filled(d, radius)), [&](const MultiIndex& m) {
    if (m > -m && keep(rng)) e.emplace_back(m, val(rng));
  });
  return CovarianceModel::finite(d, e);
}

MultiIndex random_index(std::mt19937_64& rng, std::size_t d, std::int64_t lo, std::int64_t hi) {
  std::uniform_int_distribution<std::int64_t> u(lo, hi);
  std::vector<std::int64_t> v(d);
  for (auto& x : v) x = u(rng);
  return MultiIndex(v);
}

BlockingPlan random_plan(std::mt19937_64& rng, std::size_t d, std::int64_t max_side) {
  const auto n = random_index(rng, d, 1, max_side);
  std::vector<std::int64_t> p(d), q(d);
  for (std::size_t k = 0; k < d; ++k) {
    p[k] = std::uniform_int_distribution<std::int64_t>(1, n[k])(rng);
    q[k] = std::uniform_int_distribution<std::int64_t>(1, p[k])(rng);
  }
  return partition(n, MultiIndex(p), MultiIndex(q));
}

Result variance_oracle() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int it = 0; it < 200; ++it) {
    const auto d = static_cast<std::size_t>(1 + it % 3);
    const auto model = random_finite_model(rng, d, std::uniform_int_distribution<std::int64_t>(0, 3)(rng));
    const auto n = random_index(rng, d, 1, 8);
    const double exact = variance_exact(model, n);
    const double brute = variance_bruteforce(model, n);
    worst = std::max(worst, std::abs(exact - brute) / brute);
  }
  return {worst <= 1e-9, "max relative error " + fmt(worst) + " over 200 models"};
}

Result lemma2_forward() {
  const auto model = harmonic();
  double prev = std::numeric_limits<double>::infinity();
  bool monotone = true;
  double ratio = 0.0;
  for (int j = 8; j <= 14; ++j) {
    const MultiIndex n{std::int64_t{1} << j};
    ratio = variance_exact(model, n) / (static_cast<double>(n[0]) * k_rect(model, n));
    const double gap = std::abs(1.0 - ratio);
    monotone = monotone && gap <= prev;
    prev = gap;
  }
  return {ratio >= 0.85 && ratio <= 1.0 && monotone,
          "ratio at 2^14 = " + fmt(ratio, 6) + (monotone ? ", |1 - ratio| nonincreasing" : ", |1 - ratio| not monotone")};
}

Result lemma2_sandwich_check() {
  bool all = true;
  std::string failures;
  for (const auto& [name, model] : {std::pair{"harmonic", harmonic()}, std::pair{"MA(1)", ma1_model()}}) {
    for (int j : {8, 10, 12}) {
      const auto r = lemma2_sandwich(model, MultiIndex{std::int64_t{1} << j}, 0.5, 2);
      if (!r.all_hold()) {
        all = false;
        failures += std::string(" ") + name + "@2^" + std::to_string(j);
      }
    }
  }
  return {all, all ? "all inequalities hold for both models at 2^8, 2^10, 2^12" : "violations:" + failures};
}

Result schedule_check() {
  const auto L = k_rect_fn(harmonic());
  const auto s = build_schedule(L);
  const MultiIndex n{std::int64_t{1} << 20};
  const auto q = s.q_of(n);
  const double q_over_n = static_cast<double>(q[0]) / static_cast<double>(n[0]);
  const double ratio = L(n) / L(q);
  bool nondecreasing = true;
  std::int64_t prev = 0, first = 0;
  for (int j = 1; j <= 20; ++j) {
    const auto qj = s.q_of(MultiIndex{std::int64_t{1} << j})[0];
    if (j == 1) first = qj;
    nondecreasing = nondecreasing && qj >= prev;
    prev = qj;
  }
  const bool growing = prev > first;
  return {q_over_n <= 0.01 && ratio <= 1.1 && nondecreasing && growing,
          "at n=2^20: q=" + std::to_string(q[0]) + ", q/n=" + fmt(q_over_n) + " (need <= 0.01), L(n)/L(q)=" +
              fmt(ratio, 5) + " (need <= 1.1); R values used: " + std::to_string(s.r_seq().size()) +
              (nondecreasing ? "; q nondecreasing" : "; q NOT nondecreasing")};
}

Result blocking_geometry() {
  std::mt19937_64 rng(202);
  int bad = 0;
  for (int it = 0; it < 500; ++it) {
    const auto d = static_cast<std::size_t>(1 + it % 3);
    const auto plan = random_plan(rng, d, d == 3 ? 14 : (d == 2 ? 40 : 200));
    bool ok = true;
    const Box whole = plan.box();
    for (std::size_t i = 0; i < plan.blocks.size() && ok; ++i) {
      ok = whole.contains(plan.blocks[i]);
      for (std::size_t j = i + 1; j < plan.blocks.size() && ok; ++j) ok = disjoint(plan.blocks[i], plan.blocks[j]);
    }
    std::int64_t covered = 0;
    for (const auto& b : plan.blocks) covered += b.cardinality();
    const auto corridor = static_cast<std::int64_t>(corridor_points(plan).size());
    ok = ok && covered + corridor == product(plan.n) && corridor == plan.corridor_cardinality;
    ok = ok && plan.m_lower() <= plan.block_count && plan.block_count <= plan.m_upper();
    ok = ok && plan.corridor_cardinality <= plan.corridor_cardinality_bound();
    if (!ok) ++bad;
  }
  return {bad == 0, std::to_string(500 - bad) + "/500 plans pass"};
}

Result corridor_bound() {
  std::mt19937_64 rng(303);
  int bad = 0;
  double worst = 0.0;
  for (int it = 0; it < 100; ++it) {
    const auto d = static_cast<std::size_t>(1 + it % 3);
    const auto model = random_finite_model(rng, d, std::uniform_int_distribution<std::int64_t>(0, 3)(rng));
    const auto plan = random_plan(rng, d, d == 3 ? 8 : (d == 2 ? 20 : 80));
    const auto pts = corridor_points(plan);
    long double exact = 0.0L;
    for (const auto& a : pts) {
      for (const auto& b : pts) exact += model(a - b);
    }
    const double bound = static_cast<double>(plan.corridor_cardinality) * k_rect(model, plan.n);
    if (static_cast<double>(exact) > bound * (1.0 + 1e-12)) ++bad;
    if (bound > 0.0) worst = std::max(worst, static_cast<double>(exact) / bound);
  }
  return {bad == 0, std::to_string(100 - bad) + "/100 plans satisfy the bound; max exact/bound = " + fmt(worst)};
}

Result clt_summable() {
  CltOptions opts;
  opts.run = RunOptions{10000, 707, default_threads()};
  opts.c_grid.clear();
  const std::vector<MultiIndex> grid{MultiIndex{4096}};
  const double ks_iid = run_clt(make_iid(1, 1.0), grid, opts).rows.back().ks;
  const double ks_ma = run_clt(ma1_sampler(), grid, opts).rows.back().ks;
  return {ks_iid < 0.025 && ks_ma < 0.025, "KS iid = " + fmt(ks_iid) + ", KS MA(1) = " + fmt(ks_ma) + " (need < 0.025)"};
}

Result clt_slowly_varying() {
  const auto sampler = make_gaussian(harmonic(), MultiIndex{1 << 14});
  CltOptions opts;
  opts.mode = NormalizationMode::k_rect;
  opts.run = RunOptions{5000, 808, default_threads()};
  opts.c_grid = {2.0, 4.0, 8.0};
  const std::vector<MultiIndex> grid{MultiIndex{1024}, MultiIndex{2048}, MultiIndex{4096}};
  const auto rep = run_clt(sampler, grid, opts);
  const double ks = rep.rows.back().ks;
  const double tail = rep.ui.sup_over_n.back();
  return {ks < 0.03 && tail < 0.05,
          "KS at 4096 vs N(0, " + fmt(rep.rows.back().target_variance) + ") = " + fmt(ks) +
              " (need < 0.03); sup tail at c=8 = " + fmt(tail) + " (need < 0.05)"};
}

Result certificate_trends() {
  const auto sampler = make_gaussian(harmonic(), MultiIndex{1 << 16});
  const auto schedule = build_schedule(k_rect_fn(harmonic()));
  const NormalizationSpec spec(NormalizationMode::k_rect);
  const CertificateOptions co{0.1, RunOptions{200, 909, default_threads()}};
  std::vector<double> q1, q2;
  for (int j = 8; j <= 14; ++j) {
    const MultiIndex n{std::int64_t{1} << j};
    const auto q = schedule.q_of(n);
    const auto c = q_certificate(sampler, partition(n, choose_p(n, q), q), spec, 1.0, co);
    q1.push_back(c.q1_bound);
    q2.push_back(c.q2_bound);
  }
  // "after a finite prefix": the second half of the grid, n >= 2^11
  bool q1_tail = true, q2_tail = true;
  for (std::size_t i = 4; i < q1.size(); ++i) {
    q1_tail = q1_tail && q1[i] <= q1[i - 1];
    q2_tail = q2_tail && q2[i] <= q2[i - 1];
  }
  const auto ma_schedule = build_schedule(k_rect_fn(ma1_model()));
  bool ma_zero = true;
  const auto ma = ma1_sampler();
  for (int j = 8; j <= 14; ++j) {
    const MultiIndex n{std::int64_t{1} << j};
    const auto q = ma_schedule.q_of(n);
    ma_zero = ma_zero && q_certificate(ma, partition(n, choose_p(n, q), q), spec, 1.0, co).q2_bound == 0.0;
  }
  const bool pass = q1_tail && q2_tail && q1.back() < 0.1 && q2.back() < 0.1 && ma_zero;
  return {pass, "at 2^14: q1 = " + fmt(q1.back()) + ", q2 = " + fmt(q2.back()) + " (need < 0.1); tails " +
                    (q1_tail && q2_tail ? "nonincreasing" : "not monotone") + "; MA(1) q2 " +
                    (ma_zero ? "= 0" : "!= 0")};
}

Result degenerate_rejection() {
  std::ostringstream out, err;
  const int code = run_cli({"clt", "--config", std::string(ASSOC_CLT_CONFIG_DIR) + "/constant_field_clt.json"}, out, err);
  std::string outcome = "?";
  if (code != 2 && code != 4) outcome = json::parse(out.str())["result"]["verdict"]["outcome"].get<std::string>();
  return {code == 1 && outcome == "inconsistent", "exit " + std::to_string(code) + ", verdict " + outcome};
}

Result reproducibility() {
  const std::string cfg = std::string(ASSOC_CLT_CONFIG_DIR) + "/ma1_clt.json";
  std::string reports[2];
  for (int i = 0; i < 2; ++i) {
    std::ostringstream out, err;
    (void)run_cli({"clt", "--config", cfg, "--threads", i == 0 ? "1" : "4"}, out, err);
    auto j = json::parse(out.str());
    j.erase("generated_at");
    reports[i] = j.dump();
  }
  return {reports[0] == reports[1] && !reports[0].empty(),
          reports[0] == reports[1] ? "reports identical (" + std::to_string(reports[0].size()) + " bytes, 1 vs 4 threads)"
                                   : "reports differ"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Result()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "variance oracle equivalence", 10, variance_oracle},
      {2, "variance ratio to <n>K_X(n)", 5, lemma2_forward},
      {3, "variance sandwich and converse", 5, lemma2_sandwich_check},
      {4, "corridor-width schedule", 10, schedule_check},
      {5, "blocking geometry", 10, blocking_geometry},
      {6, "corridor variance bound", 30, corridor_bound},
      {7, "CLT, summable covariance", 60, clt_summable},
      {8, "CLT, slowly varying K", 300, clt_slowly_varying},
      {9, "certificate trends", 60, certificate_trends},
      {10, "degenerate-law rejection", 10, degenerate_rejection},
      {11, "reproducibility", 600, reproducibility},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Result o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    const bool in_time = dt.count() <= c.limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s  C%-2d %-32s %s  [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), dt.count(), c.limit_s, in_time ? "" : ", TOO SLOW");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
