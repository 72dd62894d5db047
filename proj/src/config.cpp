#include "fsir/config.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "fsir/io.hpp"

namespace fsir {

namespace {

void reject_unknown_keys(const nlohmann::json& j,
                         const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!j.is_object())
    throw invalid_input("config: '" + where + "' must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key))
      throw invalid_input("config: unknown key '" + where + "." + key + "'");
}

template <typename T>
T get_field(const nlohmann::json& j, const std::string& where,
            const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw invalid_input("config: bad value for '" + where + "." + key + "'");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (basis.n_basis < 1)
    throw invalid_input("config: basis.n_basis must be >= 1");
  if (basis.grid_size < 2 * basis.n_basis)
    throw invalid_input("config: basis.grid_size must be >= 2 * n_basis");
  example.validate();
  if (example.n_basis != basis.n_basis)
    throw invalid_input("config: example.n_basis is tied to basis.n_basis");
  if (sample.n < 2) throw invalid_input("config: sample.n must be >= 2");
  if (estimate.slices.mode == SliceSpec::Mode::equal_count &&
      estimate.slices.h < 2)
    throw invalid_input("config: estimate.slices must be >= 2");
  if (estimate.ridge_c < 0.0)
    throw invalid_input("config: estimate.ridge_c must be >= 0");
  if (!(estimate.rank_tol > 0.0 && estimate.rank_tol < 1.0))
    throw invalid_input("config: estimate.rank_tol must be in (0,1)");
  if (estimate.d < 1) throw invalid_input("config: estimate.d must be >= 1");
  if (estimate.design == ObservationDesign::discrete_points) {
    if (!estimate.observation_points || estimate.observation_points->empty())
      throw invalid_input(
          "config: discrete_points design requires estimate.observation_points");
    for (double t : *estimate.observation_points)
      if (!(t >= 0.0 && t <= 1.0))
        throw invalid_input(
            "config: estimate.observation_points must lie in [0,1]");
  }
  if (estimate.covariance != "empirical" && estimate.covariance != "oracle")
    throw invalid_input(
        "config: estimate.covariance must be 'empirical' or 'oracle'");
  if (estimate.design == ObservationDesign::discrete_points &&
      estimate.covariance == "empirical")
    throw invalid_input(
        "config: empirical covariance is unavailable for discrete_points; "
        "use covariance 'oracle'");
  if (outputs.directory.empty())
    throw invalid_input("config: outputs.directory must be nonempty");
  if (outputs.formats.empty())
    throw invalid_input("config: outputs.formats must be nonempty");
  for (const auto& f : outputs.formats)
    if (f != "csv" && f != "json")
      throw invalid_input("config: outputs.formats entries must be csv|json");
}

RunConfig config_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"basis", "example", "sample", "estimate", "outputs"},
                      "");
  RunConfig cfg;

  if (j.contains("basis")) {
    const auto& b = j.at("basis");
    reject_unknown_keys(b, {"family", "n_basis", "grid_size", "quadrature"},
                        "basis");
    cfg.basis.family = basis_family_from_string(
        get_field<std::string>(b, "basis", "family", "cosine"));
    cfg.basis.n_basis = get_field<int>(b, "basis", "n_basis", 50);
    cfg.basis.grid_size = get_field<int>(b, "basis", "grid_size", 512);
    cfg.basis.quadrature = quadrature_rule_from_string(
        get_field<std::string>(b, "basis", "quadrature", "trapezoid"));
  }

  if (!j.contains("example"))
    throw invalid_input("config: missing required section 'example'");
  {
    const auto& e = j.at("example");
    reject_unknown_keys(e, {"kind", "alpha", "delta", "levels"}, "example");
    if (!e.contains("kind") || !e.contains("alpha") || !e.contains("delta"))
      throw invalid_input("config: example requires kind, alpha, delta");
    cfg.example.kind = example_kind_from_string(
        get_field<std::string>(e, "example", "kind", "binary"));
    cfg.example.alpha = get_field<double>(e, "example", "alpha", 1.0);
    cfg.example.delta = get_field<double>(e, "example", "delta", 0.5);
    if (e.contains("levels"))
      cfg.example.levels =
          get_field<std::vector<double>>(e, "example", "levels", {});
    cfg.example.n_basis = cfg.basis.n_basis;
  }

  if (!j.contains("sample"))
    throw invalid_input("config: missing required section 'sample'");
  {
    const auto& s = j.at("sample");
    reject_unknown_keys(s, {"n", "seed"}, "sample");
    if (!s.contains("n"))
      throw invalid_input("config: sample requires n");
    cfg.sample.n = get_field<int>(s, "sample", "n", 100);
    cfg.sample.seed = get_field<std::uint64_t>(s, "sample", "seed", 0);
  }

  // defaults that depend on the example kind
  cfg.estimate.slices.mode = cfg.example.kind == ExampleKind::continuous
                                 ? SliceSpec::Mode::equal_count
                                 : SliceSpec::Mode::by_category;
  cfg.estimate.slices.h = 10;

  if (j.contains("estimate")) {
    const auto& e = j.at("estimate");
    reject_unknown_keys(e,
                        {"slices", "ridge_c", "rank_tol", "d", "design",
                         "observation_points", "covariance"},
                        "estimate");
    if (e.contains("slices")) {
      const auto& s = e.at("slices");
      if (s.is_string()) {
        if (s.get<std::string>() != "by_category")
          throw invalid_input(
              "config: estimate.slices must be an integer or 'by_category'");
        cfg.estimate.slices.mode = SliceSpec::Mode::by_category;
      } else if (s.is_number_integer()) {
        cfg.estimate.slices.mode = SliceSpec::Mode::equal_count;
        cfg.estimate.slices.h = s.get<int>();
      } else {
        throw invalid_input(
            "config: estimate.slices must be an integer or 'by_category'");
      }
    }
    cfg.estimate.ridge_c = get_field<double>(e, "estimate", "ridge_c", 0.0);
    cfg.estimate.rank_tol =
        get_field<double>(e, "estimate", "rank_tol", 1e-3);
    cfg.estimate.d = get_field<int>(e, "estimate", "d", 1);
    cfg.estimate.design = observation_design_from_string(
        get_field<std::string>(e, "estimate", "design", "full_path"));
    if (e.contains("observation_points"))
      cfg.estimate.observation_points = get_field<std::vector<double>>(
          e, "estimate", "observation_points", {});
    cfg.estimate.covariance =
        get_field<std::string>(e, "estimate", "covariance", "");
  }
  if (cfg.estimate.covariance.empty())
    cfg.estimate.covariance =
        cfg.estimate.design == ObservationDesign::discrete_points
            ? "oracle"
            : "empirical";

  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    reject_unknown_keys(o, {"directory", "formats"}, "outputs");
    cfg.outputs.directory =
        get_field<std::string>(o, "outputs", "directory", "out");
    cfg.outputs.formats = get_field<std::vector<std::string>>(
        o, "outputs", "formats", {"csv", "json"});
  }

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return config_from_json(load_json_file(path));
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["basis"] = {{"family", to_string(cfg.basis.family)},
                {"n_basis", cfg.basis.n_basis},
                {"grid_size", cfg.basis.grid_size},
                {"quadrature", to_string(cfg.basis.quadrature)}};
  j["example"] = {{"kind", to_string(cfg.example.kind)},
                  {"alpha", cfg.example.alpha},
                  {"delta", cfg.example.delta}};
  if (cfg.example.levels) j["example"]["levels"] = *cfg.example.levels;
  j["sample"] = {{"n", cfg.sample.n}, {"seed", cfg.sample.seed}};
  nlohmann::json est;
  if (cfg.estimate.slices.mode == SliceSpec::Mode::by_category)
    est["slices"] = "by_category";
  else
    est["slices"] = cfg.estimate.slices.h;
  est["ridge_c"] = cfg.estimate.ridge_c;
  est["rank_tol"] = cfg.estimate.rank_tol;
  est["d"] = cfg.estimate.d;
  est["design"] = to_string(cfg.estimate.design);
  if (cfg.estimate.observation_points)
    est["observation_points"] = *cfg.estimate.observation_points;
  est["covariance"] = cfg.estimate.covariance;
  j["estimate"] = std::move(est);
  j["outputs"] = {{"directory", cfg.outputs.directory},
                  {"formats", cfg.outputs.formats}};
  return j;
}

BasisPtr make_basis(const RunConfig& cfg) {
  return BasisSpec::make(cfg.basis.family, cfg.basis.n_basis,
                         cfg.basis.grid_size, cfg.basis.quadrature);
}

}  // namespace fsir
