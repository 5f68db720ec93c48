// Copyright 2026 The dmlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dmlab/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "dmlab/io.hpp"
#include "dmlab/parallel.hpp"
#include "dmlab/rearrangement.hpp"
#include "dmlab/structure.hpp"

namespace dmlab {

namespace fs = std::filesystem;

namespace {

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json nullable(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

// Runs `body`, mapping the error types onto exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const NumericalError& e) {
    err << "numerical failure (" << to_string(e.failure()) << "): " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
}

void prepare_out_dir(const std::string& dir) {
  if (dir.empty()) throw ConfigError("--out is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir);
}

struct Manifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::chrono::system_clock::time_point started;
  double wall_ms = 0.0;
  std::string d_storage;
  std::vector<std::string> outputs;
};

void write_manifest(const std::string& dir, const Manifest& m) {
  Json j{{"tool", "dmlab"},
         {"version", kVersion},
         {"command", m.command},
         {"config_hash", m.config_hash},
         {"seed", m.seed},
         {"started_at", utc_timestamp(m.started)},
         {"finished_at", utc_timestamp(std::chrono::system_clock::now())},
         {"wall_ms", m.wall_ms},
         {"workers", worker_count()}};
  if (!m.d_storage.empty()) j["d_storage"] = m.d_storage;
  j["outputs"] = m.outputs;
  write_text_file((fs::path(dir) / "manifest.json").string(), j.dump(2) + "\n");
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

Json report_to_json(const CertifyReport& r, const CertifyConfig& config) {
  Json pass = Json::object();
  for (const auto& [name, ok] : r.pass) pass[name] = ok;
  return Json{
      {"config_hash", config_hash(config)},
      {"seed", r.seed},
      {"space",
       Json{{"family", build_space(config.space).family_tag()},
            {"n", r.n},
            {"expected_gauss_norm", r.egn},
            {"expected_gauss_norm_stderr", r.egn_std_error},
            {"expected_gauss_norm_method", r.egn_method},
            {"dual_radius", r.dual_radius},
            {"dstar", r.dstar},
            {"dstar_stderr", r.dstar_std_error},
            {"d_cap", r.d_cap}}},
      {"parameters", Json{{"d", r.d}, {"m", r.m}, {"n", r.n}, {"epsilon", config.epsilon}, {"s", r.s}, {"r", r.r},
                          {"phi", r.phi}}},
      {"lambda", r.lambda},
      {"lambda_stderr", r.lambda_std_error},
      {"lambda_ratio", r.lambda_ratio},
      {"oscillation", r.oscillation},
      {"net", Json{{"size", r.net_size}, {"candidates", r.net_candidates}}},
      {"rho", Json{{"rho", r.rho.rho}, {"lambda_min_sq", r.rho.lambda_min_sq}, {"lambda_max_sq", r.rho.lambda_max_sq}}},
      {"h_sm", r.h_sm},
      {"rearr_dev", nullable(r.rearr_dev)},
      {"w2_diam", r.w2_diam},
      {"small_ball", Json{{"count", r.small_ball.count},
                          {"required", r.small_ball.required},
                          {"passes", r.small_ball.passes}}},
      {"cond3_spread", r.cond3_spread},
      {"cond3_stderr", r.cond3_std_error},
      {"kappa", r.kappa},
      {"baseline_gap", nullable(r.baseline_gap)},
      {"decomposition", Json{{"clubs", r.decomposition.clubs},
                             {"diamonds", r.decomposition.diamonds},
                             {"hearts", r.decomposition.hearts},
                             {"xi", r.decomposition.xi},
                             {"j_big", r.decomposition.j_big},
                             {"j_outside", r.decomposition.j_outside}}},
      {"d_storage", r.d_materialized ? "materialized" : "regenerated"},
      {"pass", pass},
      {"all_pass", r.all_pass()},
      {"warnings", r.warnings},
  };
}

int cmd_certify(const CertifyCommand& cmd, std::ostream& err) {
  return guarded(err, [&] {
    const auto wall_start = std::chrono::system_clock::now();
    const auto start = std::chrono::steady_clock::now();
    CertifyConfig config = load_config(cmd.config_path);
    if (cmd.seed) config.seed = *cmd.seed;
    if (cmd.out_dir.empty()) throw ConfigError("--out is required");

    const CertifyReport report = certify(config);

    CsvTable directions({"index", "psi"});
    for (Eigen::Index k = 0; k < report.per_direction.size(); ++k) {
      directions.add_row({static_cast<std::int64_t>(k), report.per_direction[k]});
    }
    prepare_out_dir(cmd.out_dir);
    const fs::path dir(cmd.out_dir);
    write_text_file((dir / "report.json").string(), report_to_json(report, config).dump(2) + "\n");
    write_text_file((dir / "directions.csv").string(), directions.str());
    write_manifest(cmd.out_dir, {"certify", config_hash(config), config.seed, wall_start, elapsed_ms(start),
                                 report.d_materialized ? "materialized" : "regenerated",
                                 {"report.json", "directions.csv"}});
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    if (cmd.assert_pass && !report.all_pass()) {
      for (const auto& [name, ok] : report.pass) {
        if (!ok) err << "assertion failed: " << name << '\n';
      }
      return static_cast<int>(kExitAssertionFailure);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_critdim(const CritdimCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (cmd.samples < 2) throw ConfigError("--samples must be >= 2");
    const NormSpace space = build_space(cmd.space);
    const GaussNormEstimate gauss = expected_gauss_norm(space, cmd.samples, RngStream(cmd.seed, streams::kGauss),
                                                        cmd.method);
    const CriticalDimension dstar = critical_dimension(space, gauss);
    if (!std::isfinite(dstar.value) || !std::isfinite(dstar.std_error)) {
      throw NumericalError(NumericalFailure::kNonFinite, "critdim: non-finite estimate");
    }
    CsvTable table({"family", "n", "dstar", "stderr", "method"});
    table.add_row({space.family_tag(), static_cast<std::int64_t>(space.n()), dstar.value, dstar.std_error,
                   std::string(to_string(gauss.method))});
    const std::string text = table.str();
    out << text.substr(text.find('\n') + 1);
    if (!cmd.out_dir.empty()) {
      prepare_out_dir(cmd.out_dir);
      write_text_file((fs::path(cmd.out_dir) / "critdim.csv").string(), text);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_diagnose(const DiagnoseCommand& cmd, std::ostream& err) {
  return guarded(err, [&] {
    const auto wall_start = std::chrono::system_clock::now();
    const auto start = std::chrono::steady_clock::now();
    CertifyConfig config = load_config(cmd.config_path);
    if (cmd.seed) config.seed = *cmd.seed;
    if (cmd.out_dir.empty()) throw ConfigError("--out is required");

    const NormSpace space = build_space(config.space);
    const GaussNormEstimate gauss =
        expected_gauss_norm(space, config.gauss_samples, RngStream(config.seed, streams::kGauss));
    const double dstar = critical_dimension(space, gauss).value;
    const int m = config.m;
    const int s = m == 1 ? 0 : config.s ? *config.s : default_s(dstar, m, config.c1);
    const long r =
        config.r ? *config.r : std::min<long>(default_r(dstar, config.epsilon, std::max(s, 1), config.c2), m);
    const double phi_value = phi(space, gauss, r, m, config.phi_scale);
    const bool want_rearr = config.gamma == GammaMode::kRandom && config.xspec.rotation_invariant();

    CsvTable diagnostics({"trial", "seed", "d", "m", "rho", "h_sm", "rearr_dev", "w2_diam"});
    CsvTable decomposition({"trial", "direction", "clubs", "diamonds", "hearts", "xi", "j_big", "j_outside"});
    bool storage_materialized = true;
    for (int t = 0; t < config.trials; ++t) {
      const std::uint64_t ts = trial_seed(config.seed, t);
      const GammaRealization g = config.gamma == GammaMode::kIdentity
                                     ? identity_gamma(config.d)
                                     : draw_gamma(config.d, m, config.xspec, RngStream(ts, streams::kGamma));
      const Net net = build_net(config.d, config.epsilon, RngStream(ts, streams::kNet), config.net_max_points);
      if (!net.complete) throw NumericalError(NumericalFailure::kIncompleteNet, "diagnose: incomplete net");
      const Matrix probes = probe_directions(net, config.anchor, config.probe_count);

      const double rho_value = rho(g).rho;
      const double h = s >= 1 ? H_sm(g, s, net.points).value : 0.0;
      double rearr = std::numeric_limits<double>::quiet_NaN();
      if (want_rearr) {
        const long samples = config.profile_samples ? *config.profile_samples : default_profile_samples(m);
        const QuantileProfile profile = quantile_profile(config.xspec, m, samples, RngStream(ts, streams::kProfile));
        rearr = rearrangement_deviation(g, net.points, profile);
      }
      const Matrix gp = apply_gamma_columns(g, probes);
      double diam = 0.0;
      for (Eigen::Index a = 0; a < gp.cols(); ++a) {
        for (Eigen::Index b = a + 1; b < gp.cols(); ++b) diam = std::max(diam, w2(gp.col(a), gp.col(b)));
      }
      diagnostics.add_row({static_cast<std::int64_t>(t), ts, static_cast<std::int64_t>(config.d),
                           static_cast<std::int64_t>(m), rho_value, h, rearr, diam});

      if (s >= 1) {
        const DRealization dr = DRealization::draw(space.n(), m, config.zspec, RngStream(ts, streams::kD), config.storage);
        storage_materialized = dr.materialized();
        const Vector norms = z_column_norms(dr, space);
        for (Eigen::Index k = 0; k < probes.cols(); ++k) {
          const Decomposition dec = decompose(g, dr, space, probes.col(k), s, r, phi_value, norms);
          decomposition.add_row({static_cast<std::int64_t>(t), static_cast<std::int64_t>(k), space(dec.clubs),
                                 space(dec.diamonds), space(dec.hearts), dec.xi,
                                 static_cast<std::int64_t>(dec.j_big.size()), static_cast<std::int64_t>(dec.j_outside)});
        }
      }
    }

    prepare_out_dir(cmd.out_dir);
    const fs::path dir(cmd.out_dir);
    write_text_file((dir / "diagnostics.csv").string(), diagnostics.str());
    write_text_file((dir / "decomposition.csv").string(), decomposition.str());
    write_manifest(cmd.out_dir, {"diagnose", config_hash(config), config.seed, wall_start, elapsed_ms(start),
                                 storage_materialized ? "materialized" : "regenerated",
                                 {"diagnostics.csv", "decomposition.csv"}});
    return static_cast<int>(kExitOk);
  });
}

int cmd_baseline(const BaselineCommand& cmd, std::ostream& err) {
  return guarded(err, [&] {
    const auto wall_start = std::chrono::system_clock::now();
    const auto start = std::chrono::steady_clock::now();
    if (cmd.n < 1 || cmd.m < 1) throw ConfigError("--n and --m must be >= 1");
    if (cmd.trials < 1) throw ConfigError("--trials must be >= 1");
    if (cmd.out_dir.empty()) throw ConfigError("--out is required");
    cmd.zspec.validate();
    const NormSpace space = NormSpace::lp(cmd.n, cmd.p);

    CsvTable gaps({"trial", "seed", "n", "m", "gap"});
    for (int t = 0; t < cmd.trials; ++t) {
      const std::uint64_t ts = trial_seed(cmd.seed, t);
      const BaselineGap gap = baseline_gap(cmd.n, cmd.m, space, cmd.zspec, RngStream(ts, streams::kBaseline));
      gaps.add_row({static_cast<std::int64_t>(t), ts, static_cast<std::int64_t>(cmd.n),
                    static_cast<std::int64_t>(cmd.m), gap.ratio});
    }

    Json params{{"n", cmd.n}, {"m", cmd.m}, {"p", std::isinf(cmd.p) ? Json("inf") : Json(cmd.p)},
                {"zspec", to_json(cmd.zspec)}, {"trials", cmd.trials}, {"seed", cmd.seed}};
    const std::string hash = fnv1a_hex(params.dump());

    prepare_out_dir(cmd.out_dir);
    write_text_file((fs::path(cmd.out_dir) / "gap.csv").string(), gaps.str());
    write_manifest(cmd.out_dir, {"baseline", hash, cmd.seed, wall_start, elapsed_ms(start), {}, {"gap.csv"}});
    return static_cast<int>(kExitOk);
  });
}

namespace {

double parse_p(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(p >= 1.0)) throw ConfigError("--p must be a number >= 1 or \"inf\"");
  return p;
}

GaussMethod parse_method(const std::string& text) {
  if (text == "auto") return GaussMethod::kAuto;
  if (text == "monte-carlo") return GaussMethod::kMonteCarlo;
  if (text == "closed-form") return GaussMethod::kClosedForm;
  if (text == "quadrature") return GaussMethod::kQuadrature;
  throw ConfigError("--method must be auto, monte-carlo, closed-form or quadrature");
}

// --workers, then DMLAB_WORKERS, then the hardware concurrency.
void apply_workers(int flag) {
  int workers = flag;
  if (workers <= 0) {
    if (const char* env = std::getenv("DMLAB_WORKERS")) workers = std::atoi(env);
  }
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  set_worker_count(workers);
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Composite random ensembles and almost-Euclidean sections", "dmlab"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  int workers = 0;

  auto add_workers = [&workers](CLI::App* sub) {
    sub->add_option("--workers", workers, "Worker threads (falls back to DMLAB_WORKERS)");
  };

  CertifyCommand certify_cmd;
  std::uint64_t seed_value = 0;
  auto* certify_app = app.add_subcommand("certify", "Run the certification pipeline");
  certify_app->add_option("--config", certify_cmd.config_path, "Config JSON")->required();
  certify_app->add_option("--out", certify_cmd.out_dir, "Output directory")->required();
  auto* certify_seed = certify_app->add_option("--seed", seed_value, "Override the config seed");
  certify_app->add_flag("--assert", certify_cmd.assert_pass, "Exit 3 if any pass flag is false");
  add_workers(certify_app);

  std::string crit_config, crit_family = "lp", crit_p = "2", crit_rows, crit_method = "auto";
  int crit_n = 0;
  CritdimCommand crit_cmd;
  auto* crit_app = app.add_subcommand("critdim", "Estimate the critical dimension of a space");
  crit_app->add_option("--config", crit_config, "JSON file holding a space object (or a config with \"space\")");
  crit_app->add_option("--family", crit_family, "lp or max-dot");
  crit_app->add_option("--p", crit_p, "Exponent, or inf");
  crit_app->add_option("--n", crit_n, "Dimension");
  crit_app->add_option("--rows", crit_rows, "CSV of functionals (max-dot)");
  crit_app->add_option("--samples", crit_cmd.samples, "Monte Carlo samples");
  crit_app->add_option("--seed", crit_cmd.seed, "Seed");
  crit_app->add_option("--method", crit_method, "auto, monte-carlo, closed-form or quadrature");
  crit_app->add_option("--out", crit_cmd.out_dir, "Also write critdim.csv here");
  add_workers(crit_app);

  DiagnoseCommand diag_cmd;
  auto* diag_app = app.add_subcommand("diagnose", "Structural diagnostics of Gamma over trials");
  diag_app->add_option("--config", diag_cmd.config_path, "Config JSON")->required();
  diag_app->add_option("--out", diag_cmd.out_dir, "Output directory")->required();
  auto* diag_seed = diag_app->add_option("--seed", seed_value, "Override the config seed");
  add_workers(diag_app);

  BaselineCommand base_cmd;
  std::string base_p = "inf", base_z = "rademacher-iid";
  auto* base_app = app.add_subcommand("baseline", "Identity-Gamma gap over trials");
  base_app->add_option("--n", base_cmd.n, "Dimension of the space");
  base_app->add_option("--m", base_cmd.m, "Number of columns of D");
  base_app->add_option("--p", base_p, "Exponent, or inf");
  base_app->add_option("--z", base_z, "Entry law: rademacher-iid or gaussian-iid");
  base_app->add_option("--trials", base_cmd.trials, "Trials");
  base_app->add_option("--seed", base_cmd.seed, "Seed");
  base_app->add_option("--out", base_cmd.out_dir, "Output directory")->required();
  add_workers(base_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidConfig;
  }
  apply_workers(workers);

  if (certify_app->parsed()) {
    if (*certify_seed) certify_cmd.seed = seed_value;
    return cmd_certify(certify_cmd, std::cerr);
  }
  if (diag_app->parsed()) {
    if (*diag_seed) diag_cmd.seed = seed_value;
    return cmd_diagnose(diag_cmd, std::cerr);
  }
  if (crit_app->parsed()) {
    return guarded(std::cerr, [&] {
      crit_cmd.method = parse_method(crit_method);
      if (!crit_config.empty()) {
        Json j;
        try {
          j = Json::parse(read_text_file(crit_config));
        } catch (const nlohmann::json::exception& e) {
          throw ConfigError(crit_config + ": " + e.what());
        }
        const std::string base = fs::path(crit_config).parent_path().string();
        crit_cmd.space = space_from_json(j.contains("space") ? j.at("space") : j, base);
      } else if (crit_family == "lp") {
        crit_cmd.space.family = NormFamily::kLp;
        crit_cmd.space.p = parse_p(crit_p);
        crit_cmd.space.n = crit_n;
      } else if (crit_family == "max-dot") {
        crit_cmd.space.family = NormFamily::kMaxDot;
        crit_cmd.space.rows_path = crit_rows;
        if (crit_rows.empty()) throw ConfigError("--rows is required for max-dot");
      } else {
        throw ConfigError("--family must be lp or max-dot");
      }
      return cmd_critdim(crit_cmd, std::cout, std::cerr);
    });
  }
  return guarded(std::cerr, [&] {
    base_cmd.p = parse_p(base_p);
    base_cmd.zspec = DistributionSpec{parse_distribution_kind(base_z), TailFamily::kSymmetrizedPareto, 7.5, 1};
    return cmd_baseline(base_cmd, std::cerr);
  });
}

}  // namespace dmlab
