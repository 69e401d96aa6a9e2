#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "zext/error.hpp"
#include "zext/instance.hpp"
#include "zext/io.hpp"
#include "zext/relaxation.hpp"
#include "zext/solvers.hpp"

namespace zext {

inline constexpr const char* kOutDirEnv = "ZEXT_OUT_DIR";

inline constexpr const char* kGapCaveat =
    "best_integral is the cheapest labeling found by heuristics, so it is an upper bound on OPT; frac_cost is the "
    "canonical feasible fractional value, an upper bound on the LP optimum. Neither ratio column certifies an "
    "integrality gap: lp_ratio (best_integral / lp_opt) still only upper-bounds OPT / LP.";

inline const std::vector<std::string>& known_solvers() {
  static const std::vector<std::string> s{"all_to_one", "nearest_terminal", "ckr", "local_search"};
  return s;
}

struct ExperimentConfig {
  std::vector<std::size_t> n{8};
  std::size_t d = 4;
  std::vector<std::uint64_t> seeds{1};
  double epsilon = 0.1;
  std::optional<double> alpha;  // default epsilon * (ln n)^{4/3}
  std::optional<double> threshold;  // default 1 - 4 epsilon
  std::vector<std::string> solvers = known_solvers();
  std::size_t ckr_trials = 4;
  std::size_t local_rounds = 3;
  std::size_t threads = 0;  // 0: hardware concurrency
  FiberKind fiber = FiberKind::random_regular;
  std::string format = "csv";
  std::string out;
  std::string lp_opt;

  double alpha_for(std::size_t n_value) const {
    return alpha.value_or(epsilon * std::pow(std::log(static_cast<double>(n_value)), 4.0 / 3.0));
  }
  double threshold_value() const { return threshold.value_or(default_threshold(epsilon)); }

  void validate() const {
    if (n.empty()) fail("config: n list is empty");
    for (auto v : n) {
      if (v < 3) fail("config: n = ", v, " must be at least 3");
    }
    if (d < 3) fail("config: d = ", d, " must be at least 3");
    if (seeds.empty()) fail("config: no seeds");
    if (!(epsilon > 0.0) || epsilon >= 1.0) fail("config: epsilon = ", epsilon, " must lie in (0, 1)");
    if (alpha && !(*alpha > 0.0)) fail("config: alpha must be positive");
    const double t = threshold_value();
    if (!(t > 0.5) || t > 1.0) fail("config: threshold = ", t, " must lie in (1/2, 1]");
    if (solvers.empty()) fail("config: no solvers selected");
    for (const auto& s : solvers) {
      if (std::find(known_solvers().begin(), known_solvers().end(), s) == known_solvers().end()) {
        fail("config: unknown solver '", s, "'");
      }
    }
    if (format != "csv" && format != "json") fail("config: format must be csv or json, got '", format, "'");
  }
};

inline Json to_json(const ExperimentConfig& c) {
  Json j;
  j["n"] = c.n;
  j["d"] = c.d;
  j["seeds"] = c.seeds;
  j["epsilon"] = c.epsilon;
  Json alphas = Json::object();
  for (auto v : c.n) alphas[std::to_string(v)] = c.alpha_for(v);
  j["alpha"] = c.alpha ? Json(*c.alpha) : Json();
  j["alpha_effective"] = std::move(alphas);
  j["threshold"] = c.threshold_value();
  j["solvers"] = c.solvers;
  j["ckr_trials"] = c.ckr_trials;
  j["local_rounds"] = c.local_rounds;
  j["fiber"] = c.fiber == FiberKind::circulant ? "circulant" : "random_regular";
  j["rng"] = std::string(Rng::kName);
  if (!c.lp_opt.empty()) j["lp_opt"] = c.lp_opt;
  return j;
}

// "1,2,5" or "1..10" or a mix such as "1..3,7".
template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      fail(what, ": '", s, "' is not a non-negative integer");
    }
    if (used != s.size() || s.empty() || s[0] == '-') fail(what, ": '", s, "' is not a non-negative integer");
    return static_cast<T>(v);
  };
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(number(item));
      continue;
    }
    const T lo = number(item.substr(0, dots));
    const T hi = number(item.substr(dots + 2));
    if (hi < lo) fail(what, ": empty range '", item, "'");
    for (T v = lo;; ++v) {
      out.push_back(v);
      if (v == hi) break;
    }
  }
  if (out.empty()) fail(what, ": empty list");
  return out;
}

// Config files: one "key = value" per line, '#' starts a comment. Keys are
// the long flag names without dashes.
inline std::vector<std::pair<std::string, std::string>> read_config(std::istream& is, const std::string& name) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  for (std::size_t no = 1; std::getline(is, line); ++no) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(name, ":", no, ": expected 'key = value'");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    if (key.empty()) fail(name, ":", no, ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

// Optional LP optima, one "n seed value" per line.
using LpTable = std::map<std::pair<std::size_t, std::uint64_t>, double>;

inline LpTable read_lp_table(std::istream& is, const std::string& name) {
  LpTable t;
  std::string line;
  while (detail::next_data_line(is, line)) {
    std::istringstream ls(line);
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double v = 0.0;
    if (!(ls >> n >> seed >> v) || !(v > 0.0)) fail(name, ": bad line '", line, "', expected 'n seed lp_opt'");
    t[{n, seed}] = v;
  }
  return t;
}

struct GapRow {
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  double frac_cost = 0.0;
  double best_integral = 0.0;
  double ratio = 0.0;
  std::string solver;
  std::optional<double> all_to_one;
  std::optional<double> nearest_terminal;
  std::optional<double> ckr_best;
  std::optional<double> local_search;
  std::optional<double> lp_opt;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  double seconds = 0.0;
  GapProvenance provenance;

  std::optional<double> lp_ratio() const {
    if (!lp_opt) return std::nullopt;
    return best_integral / *lp_opt;
  }
};

inline bool uses(const ExperimentConfig& c, const char* solver) {
  return std::find(c.solvers.begin(), c.solvers.end(), solver) != c.solvers.end();
}

inline std::uint64_t ckr_seed(std::uint64_t seed, std::size_t trial) { return Rng::mix(seed ^ Rng::mix(0x4000 + trial)); }

inline GapRow run_gap_case(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  GapOptions opts;
  opts.fiber = cfg.fiber;
  const GapBuild b = default_gap_instance(n, cfg.d, seed, opts);
  const ZeroExtInstance& inst = b.instance;
  GapRow row;
  row.n = n;
  row.k = inst.terminal_count();
  row.seed = seed;
  row.vertices = inst.vertex_count();
  row.edges = inst.graph.edge_count();
  row.provenance = b.provenance;
  const CanonicalMetricView view(inst);
  row.frac_cost = fractional_cost(view, inst);

  Solution best{{}, kInfinity};
  auto offer = [&](const Labeling& f, double cost, const char* name) {
    if (cost < best.cost) {
      best = {f, cost};
      row.solver = name;
    }
  };
  const Baselines base = baseline_labelings(inst);
  if (uses(cfg, "all_to_one")) {
    row.all_to_one = base.all_to_one.cost;
    offer(base.all_to_one.labeling, base.all_to_one.cost, "all_to_one");
  }
  if (uses(cfg, "nearest_terminal")) {
    row.nearest_terminal = base.nearest_terminal.cost;
    offer(base.nearest_terminal.labeling, base.nearest_terminal.cost, "nearest_terminal");
  }
  if (uses(cfg, "ckr")) {
    for (std::size_t t = 0; t < std::max<std::size_t>(cfg.ckr_trials, 1); ++t) {
      const Labeling f = ckr_round(inst, view, ckr_seed(seed, t));
      const double c = integral_cost(f, inst);
      row.ckr_best = row.ckr_best ? std::min(*row.ckr_best, c) : c;
      offer(f, c, "ckr");
    }
  }
  if (uses(cfg, "local_search")) {
    // Polishes the incumbent, or the all_to_one labeling when alone.
    const Labeling startf = best.labeling.empty() ? base.all_to_one.labeling : best.labeling;
    const Labeling f = local_search(inst, startf, cfg.local_rounds);
    const double c = integral_cost(f, inst);
    row.local_search = c;
    offer(f, c, "local_search");
  }
  row.best_integral = best.cost;
  row.ratio = best.cost / row.frac_cost;
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

// Seeds fan out over worker threads; rows come back in (n, seed) order.
inline std::vector<GapRow> run_gap(const ExperimentConfig& cfg, const LpTable& lp = {}) {
  cfg.validate();
  std::vector<std::pair<std::size_t, std::uint64_t>> jobs;
  for (auto n : cfg.n) {
    for (auto s : cfg.seeds) jobs.emplace_back(n, s);
  }
  std::vector<std::optional<GapRow>> rows(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        rows[i] = run_gap_case(cfg, jobs[i].first, jobs[i].second);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<GapRow> out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!rows[i]) fail("gap n=", jobs[i].first, " seed=", jobs[i].second, ": ", errors[i]);
    if (auto it = lp.find(jobs[i]); it != lp.end()) rows[i]->lp_opt = it->second;
    out.push_back(std::move(*rows[i]));
  }
  return out;
}

inline std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

inline const char* kGapCsvHeader =
    "n,k,seed,frac_cost,best_integral,ratio,solver,all_to_one,nearest_terminal,ckr_best,local_search,lp_opt,lp_ratio";

// First line "# config <json>", then the header and one row per (n, seed).
inline void write_gap_csv(std::ostream& os, const std::vector<GapRow>& rows, const Json& config) {
  os << "# config " << config.dump() << '\n';
  os << kGapCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.n << ',' << r.k << ',' << r.seed << ',' << format_number(r.frac_cost) << ','
       << format_number(r.best_integral) << ',' << format_number(r.ratio) << ',' << r.solver << ','
       << format_optional(r.all_to_one) << ',' << format_optional(r.nearest_terminal) << ','
       << format_optional(r.ckr_best) << ',' << format_optional(r.local_search) << ',' << format_optional(r.lp_opt)
       << ',' << format_optional(r.lp_ratio()) << '\n';
  }
}

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(); }

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct GapSummary {
  std::size_t n = 0;
  std::size_t rows = 0;
  double median_ratio = 0.0;
  double median_all_to_one_ratio = 0.0;
};

inline std::vector<GapSummary> summarize(const std::vector<GapRow>& rows) {
  std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> by_n;
  for (const auto& r : rows) {
    by_n[r.n].first.push_back(r.ratio);
    if (r.all_to_one) by_n[r.n].second.push_back(*r.all_to_one / r.frac_cost);
  }
  std::vector<GapSummary> out;
  for (const auto& [n, v] : by_n) {
    out.push_back({n, v.first.size(), median(v.first), median(v.second)});
  }
  return out;
}

inline Json gap_json(const std::vector<GapRow>& rows, const Json& config) {
  Json j;
  j["format"] = "zext-gap-report";
  j["version"] = kReportFormatVersion;
  j["config"] = config;
  j["caveat"] = kGapCaveat;
  Json arr = Json::array();
  for (const auto& r : rows) {
    arr.push_back({{"n", r.n},
                   {"k", r.k},
                   {"seed", r.seed},
                   {"vertices", r.vertices},
                   {"edges", r.edges},
                   {"frac_cost", r.frac_cost},
                   {"best_integral", r.best_integral},
                   {"ratio", r.ratio},
                   {"solver", r.solver},
                   {"all_to_one", optional_json(r.all_to_one)},
                   {"nearest_terminal", optional_json(r.nearest_terminal)},
                   {"ckr_best", optional_json(r.ckr_best)},
                   {"local_search", optional_json(r.local_search)},
                   {"lp_opt", optional_json(r.lp_opt)},
                   {"lp_ratio", optional_json(r.lp_ratio())},
                   {"provenance", to_json(r.provenance)}});
  }
  j["rows"] = std::move(arr);
  Json sum = Json::array();
  for (const auto& s : summarize(rows)) {
    sum.push_back({{"n", s.n},
                   {"rows", s.rows},
                   {"median_ratio", s.median_ratio},
                   {"median_all_to_one_ratio", s.rows ? Json(s.median_all_to_one_ratio) : Json()}});
  }
  j["summary"] = std::move(sum);
  return j;
}

// Cloud g labeled with the terminal of (g, h0) everywhere.
inline Labeling cloud_labeling(const ZeroExtInstance& inst, const ExtendedGraph& x, VertexId h0 = 0) {
  if (!inst.is_gap() || inst.terminal_count() != x.vertex_count()) fail("cloud labeling: instance does not match extension");
  if (h0 >= x.cloud_size()) fail("cloud labeling: fiber vertex ", h0, " out of range");
  Labeling f(inst.vertex_count());
  for (VertexId v = 0; v < x.vertex_count(); ++v) f[v] = x.vertex(x.cloud_of(v), h0);
  for (std::size_t t = 0; t < inst.terminal_count(); ++t) f[inst.terminals[t]] = static_cast<std::uint32_t>(t);
  return f;
}

// Output location: explicit path, else $ZEXT_OUT_DIR/<fallback>, else
// empty (stdout).
inline std::string resolve_output(const std::string& explicit_path, const std::string& fallback) {
  if (!explicit_path.empty()) return explicit_path;
  if (const char* dir = std::getenv(kOutDirEnv); dir && *dir) return std::string(dir) + "/" + fallback;
  return {};
}

}  // namespace zext
