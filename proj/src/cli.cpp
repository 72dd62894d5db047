#include "fsir/cli.hpp"

#include <cmath>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fsir/diagnostics.hpp"
#include "fsir/io.hpp"
#include "fsir/rng.hpp"

namespace fsir {

namespace {

constexpr int kFormatVersion = 1;
constexpr int kMcSamples = 100000;

std::filesystem::path out_dir(const RunConfig& cfg) {
  return std::filesystem::path(cfg.outputs.directory);
}

void ensure_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir(cfg), ec);
  if (ec)
    throw io_error("cannot create output directory '" +
                   cfg.outputs.directory + "': " + ec.message());
}

nlohmann::json stamped(const RunConfig& cfg) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["config"] = config_to_json(cfg);
  return j;
}

Eigen::VectorXd observation_points(const RunConfig& cfg) {
  const auto& pts = *cfg.estimate.observation_points;
  Eigen::VectorXd v(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t k = 0; k < pts.size(); ++k)
    v[static_cast<Eigen::Index>(k)] = pts[k];
  return v;
}

nlohmann::json membership_to_json(const MembershipReport& rep) {
  nlohmann::json j;
  j["target_space"] = to_string(rep.target_space);
  j["block_sums"] = rep.block_sums;
  j["verdict"] = to_string(rep.verdict);
  if (std::isfinite(rep.decay_exponent))
    j["decay_exponent"] = rep.decay_exponent;
  else
    j["decay_exponent"] = nullptr;
  j["series_value"] = rep.series_value;
  return j;
}

}  // namespace

void cmd_simulate(const RunConfig& cfg) {
  const BasisPtr basis = make_basis(cfg);
  const auto samples =
      gen_example(cfg.example, basis, cfg.sample.n, cfg.sample.seed);
  ensure_out_dir(cfg);

  if (cfg.estimate.design == ObservationDesign::full_path) {
    atomic_write_file(out_dir(cfg) / "dataset.csv",
                      dataset_to_csv(samples, ObservationDesign::full_path));
  } else {
    const Eigen::VectorXd pts = observation_points(cfg);
    const Eigen::MatrixXd at_pts = basis->values_at(pts);
    std::vector<Sample> obs(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      obs[i].y = samples[i].y;
      obs[i].a = at_pts * samples[i].a;
    }
    atomic_write_file(out_dir(cfg) / "dataset.csv",
                      dataset_to_csv(obs, ObservationDesign::discrete_points));
    nlohmann::json sidecar = stamped(cfg);
    sidecar["points"] = *cfg.estimate.observation_points;
    write_json_file(out_dir(cfg) / "observation_points.json", sidecar);
  }
  write_json_file(out_dir(cfg) / "dataset.meta.json", stamped(cfg));
}

void cmd_fit(const RunConfig& cfg) {
  const BasisPtr basis = make_basis(cfg);
  const CsvDataset csv = load_dataset_csv(out_dir(cfg) / "dataset.csv");
  if (csv.design != cfg.estimate.design)
    throw invalid_input(
        "fit: dataset design does not match estimate.design in the config");

  FunctionalDataset data;
  data.design = csv.design;
  data.y = csv.y;
  data.values = csv.values;
  data.basis = basis;
  if (data.design == ObservationDesign::discrete_points) {
    data.obs_points = observation_points(cfg);
    if (data.obs_points.size() != data.values.cols())
      throw invalid_input(
          "fit: observation_points length does not match dataset columns");
  } else if (data.values.cols() != basis->n_basis()) {
    throw invalid_input("fit: dataset column count does not match n_basis");
  }

  FitOptions opt;
  opt.slices = cfg.estimate.slices;
  opt.d = cfg.estimate.d;
  opt.rank_tol = cfg.estimate.rank_tol;
  opt.ridge_c = cfg.estimate.ridge_c;

  std::optional<SpectralOperator> oracle_gamma;
  if (cfg.estimate.covariance == "oracle")
    oracle_gamma = oracle_kernels(cfg.example, basis).gamma;

  const FitOutput fit =
      fit_fsir(data, opt, oracle_gamma ? &*oracle_gamma : nullptr);

  ensure_out_dir(cfg);
  nlohmann::json result = stamped(cfg);
  result.update(fsir_result_to_json(fit.result));
  write_json_file(out_dir(cfg) / "result.json", result);

  nlohmann::json means = stamped(cfg);
  means.update(slice_means_to_json(fit.means));
  write_json_file(out_dir(cfg) / "slice_means.json", means);
}

void cmd_oracle_compare(const RunConfig& cfg) {
  const BasisPtr basis = make_basis(cfg);
  const nlohmann::json rj = load_json_file(out_dir(cfg) / "result.json");
  const FsirResult result = fsir_result_from_json(rj, basis);
  if (result.betas.empty())
    throw invalid_input("oracle-compare: result has no directions");

  const OracleKernels ops = oracle_kernels(cfg.example, basis);
  const FunctionCoef beta_oracle = oracle_beta(cfg.example, basis);

  const double cosine =
      gamma_cosine(result.betas[0], beta_oracle, ops.gamma);
  const double dist = subspace_distance({result.betas[0]}, {beta_oracle},
                                        ops.gamma);
  const double s =
      partial_power_sum(2.0 + 2.0 * cfg.example.delta, cfg.example.n_basis);
  const double r = cfg.example.alpha * cfg.example.alpha * s;

  nlohmann::json out = stamped(cfg);
  out["cosine_gamma_metric"] = cosine;
  out["subspace_distance"] = dist;
  out["lambda_hat"] = result.eigvals.size() > 0 ? result.eigvals[0] : 0.0;
  out["lambda_oracle"] = r / (1.0 + r);

  if (cfg.example.kind == ExampleKind::binary) {
    // fresh draws on an independent stream; orient the fitted direction
    // toward the oracle before classifying
    FunctionCoef bhat = result.betas[0];
    if (cosine < 0.0) bhat.coef = -bhat.coef;
    const std::uint64_t mc_seed =
        splitmix64(cfg.sample.seed ^ 0xA5EDC0DE5EEDull);
    const auto fresh = gen_example(cfg.example, basis, kMcSamples, mc_seed);
    int wrong = 0;
    for (const Sample& smp : fresh) {
      const int pred = classify(bhat, FunctionCoef{smp.a, basis});
      if (pred != (smp.y > 0 ? 1 : -1)) ++wrong;
    }
    out["mc_error_rate"] = static_cast<double>(wrong) / kMcSamples;
    out["analytic_error_rate"] = analytic_error_rate(cfg.example);
  } else {
    out["mc_error_rate"] = nullptr;
    out["analytic_error_rate"] = nullptr;
  }

  ensure_out_dir(cfg);
  write_json_file(out_dir(cfg) / "oracle_compare.json", out);
}

void cmd_diagnose(const RunConfig& cfg) {
  const BasisPtr basis = make_basis(cfg);
  const OracleKernels ops = oracle_kernels(cfg.example, basis);
  const FunctionCoef beta = oracle_beta(cfg.example, basis);
  nlohmann::json checks = nlohmann::json::array();

  {
    const Theorem1Report rep =
        theorem1_check(ops.gamma, ops.gamma_e, 1000, cfg.sample.seed);
    const double norm_gap =
        std::abs(rep.op_norm_whitened - rep.op_norm_hgamma) /
        std::max(rep.op_norm_whitened, 1e-300);
    nlohmann::json c;
    c["check"] = "norm_transfer";
    c["inputs"] = {{"trials", rep.trials}, {"seed", cfg.sample.seed}};
    c["statistics"] = {{"max_rel_discrepancy", rep.max_rel_discrepancy},
                       {"op_norm_whitened", rep.op_norm_whitened},
                       {"op_norm_hgamma", rep.op_norm_hgamma},
                       {"sup_ratio_random", rep.sup_ratio_random},
                       {"op_norm_rel_gap", norm_gap}};
    c["verdict"] = (rep.max_rel_discrepancy < 1e-8 && norm_gap < 1e-6)
                       ? "pass"
                       : "fail";
    checks.push_back(std::move(c));
  }

  {
    const BetaMembershipReport rep = beta_membership_check(beta, ops.gamma_w);
    nlohmann::json c;
    c["check"] = "beta_membership";
    c["inputs"] = {{"delta", cfg.example.delta},
                   {"n_basis", cfg.example.n_basis}};
    c["statistics"] = {{"l2", membership_to_json(rep.l2)},
                       {"weighted", membership_to_json(rep.weighted)}};
    c["verdict"] = to_string(rep.weighted.verdict);
    checks.push_back(std::move(c));
  }

  {
    // population class means alpha * y * sum_i i^{-(2+delta)} psi_i
    std::vector<double> ys;
    if (cfg.example.kind == ExampleKind::categorical)
      ys = cfg.example.effective_levels();
    else
      ys = {-1.0, 1.0};
    SliceMeans means;
    FunctionCoef g;
    g.basis = basis;
    g.coef.resize(cfg.example.n_basis);
    for (int i = 1; i <= cfg.example.n_basis; ++i)
      g.coef[i - 1] = std::pow(static_cast<double>(i),
                               -(2.0 + cfg.example.delta));
    for (double y : ys) {
      FunctionCoef m;
      m.basis = basis;
      m.coef = cfg.example.alpha * y * g.coef;
      means.means.push_back(std::move(m));
      means.weights.push_back(1.0 / static_cast<double>(ys.size()));
      means.degenerate.push_back(false);
    }
    const auto reps = mean_range_check(means, ops.gamma_w);
    nlohmann::json stats = nlohmann::json::array();
    bool all_conv = true;
    for (const auto& rep : reps) {
      stats.push_back(membership_to_json(rep));
      all_conv = all_conv && rep.verdict == Verdict::converging;
    }
    nlohmann::json c;
    c["check"] = "mean_range";
    c["inputs"] = {{"class_values", ys}};
    c["statistics"] = std::move(stats);
    c["verdict"] = all_conv ? "converging" : "not_converging";
    checks.push_back(std::move(c));
  }

  {
    const LinearityReport rep =
        linearity_check(ops.gamma, beta, cfg.sample.n, cfg.sample.seed);
    nlohmann::json c;
    c["check"] = "linearity";
    c["inputs"] = {{"n", rep.n}, {"seed", cfg.sample.seed}};
    c["statistics"] = {
        {"slopes_beyond_3se", rep.slopes_beyond_3se},
        {"intercepts_beyond_3se", rep.intercepts_beyond_3se},
        {"frac_slopes_beyond_3se", rep.frac_slopes_beyond_3se},
        {"frac_intercepts_beyond_3se", rep.frac_intercepts_beyond_3se}};
    c["verdict"] = (rep.frac_slopes_beyond_3se <= 0.01 &&
                    rep.frac_intercepts_beyond_3se <= 0.01)
                       ? "pass"
                       : "fail";
    checks.push_back(std::move(c));
  }

  ensure_out_dir(cfg);
  nlohmann::json out = stamped(cfg);
  out["checks"] = std::move(checks);
  write_json_file(out_dir(cfg) / "diagnostics.json", out);
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"functional sliced inverse regression in the enlarged space"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool have_seed_override = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration JSON")
        ->required();
    sub->add_option("--out", out_override,
                    "override outputs.directory from the config");
    sub->add_option("--seed-override", seed_override,
                    "override sample.seed from the config")
        ->each([&](const std::string&) { have_seed_override = true; });
  };

  CLI::App* sim = app.add_subcommand("simulate", "draw a labelled dataset");
  CLI::App* fit = app.add_subcommand("fit", "estimate directions from dataset.csv");
  CLI::App* cmp = app.add_subcommand("oracle-compare",
                                     "compare result.json against the oracle");
  CLI::App* dia = app.add_subcommand("diagnose", "run the diagnostic suite");
  for (CLI::App* sub : {sim, fit, cmp, dia}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.outputs.directory = out_override;
    if (have_seed_override) cfg.sample.seed = seed_override;
    cfg.validate();

    if (sim->parsed()) cmd_simulate(cfg);
    else if (fit->parsed()) cmd_fit(cfg);
    else if (cmp->parsed()) cmd_oracle_compare(cfg);
    else cmd_diagnose(cfg);
    return kExitOk;
  } catch (const invalid_input& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const numeric_error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace fsir
