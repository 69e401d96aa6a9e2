#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zext/zext.hpp"

namespace {

using zext::Json;

enum ExitCode { kOk = 0, kFailed = 1, kTooLarge = 3, kCheckFailed = 4 };

struct Source {
  std::string instance;
  std::size_t n = 8;
  std::size_t d = 4;
  std::uint64_t seed = 1;
  std::string fiber = "random_regular";
};

zext::FiberKind fiber_kind(const std::string& s) {
  if (s == "random_regular") return zext::FiberKind::random_regular;
  if (s == "circulant") return zext::FiberKind::circulant;
  zext::fail("unknown fiber kind '", s, "' (random_regular or circulant)");
}

void add_source(CLI::App* sub, Source& s) {
  sub->add_option("--instance", s.instance, "instance JSON (otherwise one is generated from --n/--d/--seed)");
  sub->add_option("--n", s.n, "base graph size n (k = n^2 terminals)");
  sub->add_option("--d", s.d, "degree of G and H");
  sub->add_option("--seed", s.seed, "generation seed");
  sub->add_option("--fiber", s.fiber, "fiber family: random_regular or circulant");
}

struct Loaded {
  zext::ZeroExtInstance inst;
  Json provenance;
};

Loaded load(const Source& s) {
  if (!s.instance.empty()) {
    const Json j = zext::read_json_file(s.instance);
    return {zext::instance_from_json(j), j.value("provenance", Json())};
  }
  zext::GapOptions opts;
  opts.fiber = fiber_kind(s.fiber);
  auto b = zext::default_gap_instance(s.n, s.d, s.seed, opts);
  return {std::move(b.instance), zext::to_json(b.provenance)};
}

const zext::ExtendedGraph& extension_of(const zext::ZeroExtInstance& inst) {
  if (!inst.is_gap()) zext::fail("this command needs a gap instance (one built from an extension)");
  return *inst.origin->extension;
}

// Effective value of every long option of a subcommand.
Json options_json(const CLI::App* sub) {
  Json j = Json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || opt->get_lnames().empty()) continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      j[name] = r.size() == 1 ? Json(r.front()) : Json(r);
    } else if (!opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

Json config_json(const CLI::App* sub, const Json& extra = Json()) {
  Json j;
  j["command"] = sub->get_name();
  j["options"] = options_json(sub);
  j["rng"] = std::string(zext::Rng::kName);
  if (!extra.is_null()) j["provenance"] = extra;
  return j;
}

// Config values override flags; keys must name a long option.
void apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) zext::fail("cannot open config '", path, "'");
  for (const auto& [key, value] : zext::read_config(in, path)) {
    CLI::Option* opt = key == "config" ? nullptr : sub->get_option_no_throw("--" + key);
    if (opt == nullptr) zext::fail(path, ": unknown key '", key, "' for command ", sub->get_name());
    opt->clear();
    opt->add_result(value);
    opt->run_callback();
  }
}

void emit(const std::string& out, const std::string& fallback, const std::string& text) {
  const std::string path = zext::resolve_output(out, fallback);
  if (path.empty()) {
    std::cout << text;
  } else {
    zext::write_text_file(path, text);
    std::cerr << "wrote " << path << '\n';
  }
}

std::string format_ext(const std::string& format) { return format == "json" ? "json" : "csv"; }

std::optional<zext::Labeling> read_labeling_file(const std::string& path, const zext::ZeroExtInstance& inst) {
  if (path.empty()) return std::nullopt;
  std::ifstream in(path);
  if (!in) zext::fail("cannot open labeling '", path, "'");
  return zext::read_labeling(in, inst);
}

struct SplitArgs {
  double epsilon = 0.1;
  std::optional<double> alpha;
  std::optional<double> threshold;
  std::string labeling;
  zext::VertexId h0 = 0;
  bool force = false;
};

void add_split_args(CLI::App* sub, SplitArgs& a) {
  sub->add_option("--epsilon", a.epsilon, "split epsilon");
  sub->add_option("--alpha", a.alpha, "distance bound (default epsilon * (ln n)^(4/3))");
  sub->add_option("--threshold", a.threshold, "cloud majority threshold (default 1 - 4 epsilon)");
  sub->add_option("--labeling", a.labeling, "labeling file ('vertex terminal_vertex' lines); default: cloud labeling");
  sub->add_option("--h0", a.h0, "fiber vertex naming each cloud's terminal in the cloud labeling");
}

zext::SplitCandidate candidate(const zext::ZeroExtInstance& inst, const SplitArgs& a) {
  const auto& x = extension_of(inst);
  const auto f = read_labeling_file(a.labeling, inst).value_or(zext::cloud_labeling(inst, x, a.h0));
  const std::size_t n = x.cloud_count();
  const double alpha = a.alpha.value_or(a.epsilon * std::pow(std::log(static_cast<double>(n)), 4.0 / 3.0));
  return zext::build_split_candidate(inst, x, f, alpha, a.epsilon, a.threshold.value_or(zext::default_threshold(a.epsilon)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zext: 0-extension integrality-gap toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  std::string config;

  // generate
  Source gen_src;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "build a gap instance and write it as JSON");
  add_source(gen, gen_src);
  gen->add_option("--out", gen_out, "output file");
  gen->add_option("--config", config, "key = value file overriding flags");

  // frac
  Source frac_src;
  std::string frac_out;
  std::string frac_format = "csv";
  auto* frac = app.add_subcommand("frac", "canonical fractional solution: cost and feasibility");
  add_source(frac, frac_src);
  frac->add_option("--out", frac_out, "output file");
  frac->add_option("--format", frac_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  frac->add_option("--config", config, "key = value file overriding flags");

  // solve
  Source solve_src;
  std::string solve_out;
  std::string solver = "local_search";
  std::size_t trials = 4;
  std::size_t rounds = 3;
  std::string labeling_out;
  std::string solve_format = "csv";
  auto* solve = app.add_subcommand("solve", "integral heuristics (or brute force on tiny instances)");
  add_source(solve, solve_src);
  solve->add_option("--solver", solver, "all_to_one, nearest_terminal, ckr, local_search or brute_force")
      ->check(CLI::IsMember({"all_to_one", "nearest_terminal", "ckr", "local_search", "brute_force"}));
  solve->add_option("--trials", trials, "CKR trials");
  solve->add_option("--rounds", rounds, "local search sweeps");
  solve->add_option("--labeling-out", labeling_out, "write the labeling here");
  solve->add_option("--out", solve_out, "output file");
  solve->add_option("--format", solve_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  solve->add_option("--config", config, "key = value file overriding flags");

  // split
  Source split_src;
  SplitArgs split_args;
  std::string split_out;
  auto* split = app.add_subcommand("split", "evaluate the split conditions for a labeling");
  add_source(split, split_src);
  add_split_args(split, split_args);
  split->add_option("--out", split_out, "report file (JSON)");
  split->add_option("--config", config, "key = value file overriding flags");

  // cert
  Source cert_src;
  SplitArgs cert_args;
  std::string cert_out;
  auto* cert = app.add_subcommand("cert", "certificate, inner-component graph R and its bounds");
  add_source(cert, cert_src);
  add_split_args(cert, cert_args);
  cert->add_flag("--force", cert_args.force, "build even when the candidate is not a split");
  cert->add_option("--out", cert_out, "certificate file (JSON)");
  cert->add_option("--config", config, "key = value file overriding flags");

  // export-lp
  Source lp_src;
  std::string lp_out;
  std::size_t lp_cap = zext::kLpVertexCap;
  auto* lp = app.add_subcommand("export-lp", "write the metric relaxation in CPLEX LP format");
  add_source(lp, lp_src);
  lp->add_option("--cap", lp_cap, "largest vertex count allowed");
  lp->add_option("--out", lp_out, "LP file");
  lp->add_option("--config", config, "key = value file overriding flags");

  // gap
  zext::ExperimentConfig cfg;
  std::string gap_n = "8";
  std::string gap_seeds;
  std::uint64_t gap_seed = 1;
  std::string gap_solvers = "all_to_one,nearest_terminal,ckr,local_search";
  std::string gap_fiber = "random_regular";
  double gap_alpha = 0.0;
  double gap_threshold = 0.0;
  auto* gap = app.add_subcommand("gap", "integral vs fractional value over many seeds");
  gap->add_option("--n", gap_n, "list of n, e.g. 8,16,32");
  gap->add_option("--d", cfg.d, "degree");
  gap->add_option("--seed", gap_seed, "single seed");
  gap->add_option("--seeds", gap_seeds, "seed list, e.g. 1..10 (overrides --seed)");
  gap->add_option("--epsilon", cfg.epsilon, "recorded epsilon");
  gap->add_option("--alpha", gap_alpha, "recorded alpha (default epsilon * (ln n)^(4/3))");
  gap->add_option("--threshold", gap_threshold, "recorded threshold (default 1 - 4 epsilon)");
  gap->add_option("--solvers", gap_solvers, "comma list of heuristics");
  gap->add_option("--ckr-trials", cfg.ckr_trials, "CKR roundings per seed");
  gap->add_option("--local-rounds", cfg.local_rounds, "local search sweeps");
  gap->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
  gap->add_option("--fiber", gap_fiber, "random_regular or circulant");
  gap->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  gap->add_option("--out", cfg.out, "output file");
  gap->add_option("--lp-opt", cfg.lp_opt, "file of 'n seed lp_opt' lines from an external LP solver");
  gap->add_option("--config", config, "key = value file overriding flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (!config.empty()) apply_config(active, config);

    if (active == gen) {
      Loaded l = load(gen_src);
      const Json j = zext::instance_json(l.inst, config_json(gen, l.provenance));
      emit(gen_out, "instance.json", j.dump(1) + "\n");
      return kOk;
    }

    if (active == frac) {
      Loaded l = load(frac_src);
      const zext::CanonicalMetricView view(l.inst);
      const double cost = zext::fractional_cost(view, l.inst);
      const auto violations = zext::is_feasible(view, l.inst);
      const std::size_t edges = l.inst.graph.edge_count();
      std::cout << "cost: " << zext::format_number(cost) << "\nedges: " << edges
                << "\nfeasible: " << (violations.empty() ? "true" : "false") << '\n';
      for (std::size_t i = 0; i < std::min<std::size_t>(violations.size(), 5); ++i) {
        const auto& v = violations[i];
        std::cout << "violation: " << zext::to_string(v.kind) << ' ' << v.a << ' ' << v.b << ' ' << v.c << ' '
                  << v.magnitude << '\n';
      }
      const Json cj = config_json(frac, l.provenance);
      if (!frac_out.empty() || std::getenv(zext::kOutDirEnv)) {
        std::ostringstream os;
        if (frac_format == "json") {
          os << Json{{"config", cj}, {"vertices", l.inst.vertex_count()}, {"edges", edges}, {"frac_cost", cost},
                     {"feasible", violations.empty()}, {"violations", violations.size()}}
                    .dump(1)
             << '\n';
        } else {
          os << "# config " << cj.dump() << "\nvertices,edges,frac_cost,feasible\n"
             << l.inst.vertex_count() << ',' << edges << ',' << zext::format_number(cost) << ','
             << (violations.empty() ? "true" : "false") << '\n';
        }
        emit(frac_out, "frac." + format_ext(frac_format), os.str());
      }
      return violations.empty() ? kOk : kCheckFailed;
    }

    if (active == solve) {
      Loaded l = load(solve_src);
      const auto& inst = l.inst;
      zext::Labeling f;
      if (solver == "brute_force") {
        f = zext::brute_force(inst).labeling;
      } else if (solver == "ckr") {
        if (!inst.is_gap()) zext::fail("ckr needs the canonical fractional solution of a gap instance");
        const zext::CanonicalMetricView view(inst);
        double best = zext::kInfinity;
        for (std::size_t t = 0; t < std::max<std::size_t>(trials, 1); ++t) {
          auto g = zext::ckr_round(inst, view, zext::ckr_seed(solve_src.seed, t));
          const double c = zext::integral_cost(g, inst);
          if (c < best) {
            best = c;
            f = std::move(g);
          }
        }
      } else {
        const auto base = zext::baseline_labelings(inst);
        if (solver == "all_to_one") {
          f = base.all_to_one.labeling;
        } else if (solver == "nearest_terminal") {
          f = base.nearest_terminal.labeling;
        } else {
          const auto& start = base.nearest_terminal.cost < base.all_to_one.cost ? base.nearest_terminal : base.all_to_one;
          f = zext::local_search(inst, start.labeling, rounds);
        }
      }
      const double cost = zext::integral_cost(f, inst);
      std::cout << "solver: " << solver << "\ncost: " << zext::format_number(cost) << '\n';
      if (!labeling_out.empty()) {
        std::ostringstream os;
        zext::write_labeling(os, f, inst);
        zext::write_text_file(labeling_out, os.str());
      }
      const Json cj = config_json(solve, l.provenance);
      if (!solve_out.empty() || std::getenv(zext::kOutDirEnv)) {
        std::ostringstream os;
        if (solve_format == "json") {
          os << Json{{"config", cj}, {"solver", solver}, {"cost", cost}}.dump(1) << '\n';
        } else {
          os << "# config " << cj.dump() << "\nsolver,cost\n" << solver << ',' << zext::format_number(cost) << '\n';
        }
        emit(solve_out, "solve." + format_ext(solve_format), os.str());
      }
      return kOk;
    }

    if (active == split) {
      Loaded l = load(split_src);
      const auto c = candidate(l.inst, split_args);
      const auto report = zext::verify_split(c, extension_of(l.inst));
      std::cout << "size: " << (report.size_ok ? "ok" : "fail") << " (" << report.sub_edges << " of "
                << report.base_edges << " edges, need " << report.size_required << ")\n"
                << "cycle_homeomorphism: " << (report.homeomorphism_ok ? "ok" : "fail") << '\n'
                << "distance: " << (report.distance_ok ? "ok" : "fail") << " (" << report.distance_violations.size()
                << " violations)\n"
                << "closeness: " << (report.closeness_ok ? "ok" : "fail") << " (hop limit " << report.hop_limit << ")\n"
                << "split: " << (report.ok() ? "true" : "false") << '\n';
      Json j = zext::to_json(report);
      j["config"] = config_json(split, l.provenance);
      emit(split_out, "split.json", j.dump(1) + "\n");
      return kOk;
    }

    if (active == cert) {
      Loaded l = load(cert_src);
      const auto& x = extension_of(l.inst);
      const auto c = candidate(l.inst, cert_args);
      const auto run = zext::run_certificate(x, c, cert_args.force);
      const auto rebuilt = zext::reconstruct_R(run.cert);
      const auto paths = zext::reconstruct_paths(run.ft, x, zext::endpoint_identities(run.paths, x));
      const bool round_trip = rebuilt == run.icc && paths == run.paths;
      const auto diag = zext::diagnostics(run.icc, x.base(), cert_args.epsilon, x.base().degree(0));
      std::cout << "paths: " << run.paths.size() << "\ninner_components: " << run.icc.components.size()
                << "\nr_edges: " << run.icc.edges.size() << "\ns_tot: " << diag.s_tot << "\nb1: " << diag.b1
                << "\nlower_stated: " << diag.lower_stated << (diag.lower_stated_ok ? " ok" : " fail")
                << "\nupper: " << diag.upper << (diag.upper_ok ? " ok" : " fail")
                << "\nconstraint_edges: " << diag.constraints.size() << (diag.beta_sum_ok ? " ok" : " fail")
                << "\nround_trip: " << (round_trip ? "true" : "false") << '\n';
      Json j = zext::to_json(run.cert);
      j["config"] = config_json(cert, l.provenance);
      j["r"] = zext::to_json(run.icc);
      j["diagnostics"] = zext::to_json(diag);
      j["round_trip"] = round_trip;
      emit(cert_out, "certificate.json", j.dump(1) + "\n");
      return round_trip ? kOk : kCheckFailed;
    }

    if (active == lp) {
      Loaded l = load(lp_src);
      std::ostringstream os;
      os << "\\ config " << config_json(lp, l.provenance).dump() << '\n';
      zext::export_lp(l.inst, os, lp_cap);
      emit(lp_out, "relaxation.lp", os.str());
      return kOk;
    }

    if (active == gap) {
      cfg.n = zext::parse_list<std::size_t>(gap_n, "--n");
      cfg.seeds = gap_seeds.empty() ? std::vector<std::uint64_t>{gap_seed} : zext::parse_list<std::uint64_t>(gap_seeds, "--seeds");
      cfg.solvers.clear();
      std::stringstream ss(gap_solvers);
      for (std::string s; std::getline(ss, s, ',');) {
        if (!s.empty()) cfg.solvers.push_back(s);
      }
      cfg.fiber = fiber_kind(gap_fiber);
      if (gap->get_option("--alpha")->count() > 0) cfg.alpha = gap_alpha;
      if (gap->get_option("--threshold")->count() > 0) cfg.threshold = gap_threshold;
      cfg.validate();
      zext::LpTable table;
      if (!cfg.lp_opt.empty()) {
        std::ifstream in(cfg.lp_opt);
        if (!in) zext::fail("cannot open '", cfg.lp_opt, "'");
        table = zext::read_lp_table(in, cfg.lp_opt);
      }
      const auto rows = zext::run_gap(cfg, table);
      const Json cj = zext::to_json(cfg);
      std::ostringstream os;
      if (cfg.format == "json") {
        os << zext::gap_json(rows, cj).dump(1) << '\n';
      } else {
        zext::write_gap_csv(os, rows, cj);
      }
      emit(cfg.out, "gap." + format_ext(cfg.format), os.str());
      std::cerr << "caveat: " << zext::kGapCaveat << '\n';
      for (const auto& s : zext::summarize(rows)) {
        std::cerr << "n=" << s.n << " rows=" << s.rows << " median_ratio=" << s.median_ratio
                  << " median_all_to_one_ratio=" << s.median_all_to_one_ratio << '\n';
      }
      double total = 0.0;
      for (const auto& r : rows) total += r.seconds;
      std::cerr << "compute_seconds=" << total << '\n';
      return kOk;
    }
  } catch (const zext::TooLarge& e) {
    std::cerr << Json{{"error", "too_large"}, {"message", e.what()}}.dump() << '\n';
    return kTooLarge;
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", "failed"}, {"message", e.what()}}.dump() << '\n';
    return kFailed;
  }
  return kFailed;
}
