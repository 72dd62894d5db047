#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fsir/estimate.hpp"
#include "fsir/simulate.hpp"

namespace fsir {

/**
 * One JSON config drives every subcommand.  Unknown keys anywhere are
 * rejected; every field is validated before any computation starts.
 * Optional fields resolve to the defaults below, and outputs embed the
 * fully resolved config.
 */
struct RunConfig {
  struct Basis {
    BasisFamily family = BasisFamily::cosine;
    int n_basis = 50;
    int grid_size = 512;
    QuadratureRule quadrature = QuadratureRule::trapezoid;
  } basis;

  ExampleSpec example;

  struct SampleCfg {
    int n = 100;
    std::uint64_t seed = 0;
  } sample;

  struct EstimateCfg {
    SliceSpec slices;              // resolved from "slices" (int or "by_category")
    double ridge_c = 0.0;
    double rank_tol = 1e-3;
    int d = 1;
    ObservationDesign design = ObservationDesign::full_path;
    std::optional<std::vector<double>> observation_points;
    std::string covariance;        // "empirical" or "oracle"
  } estimate;

  struct Outputs {
    std::string directory = "out";
    std::vector<std::string> formats = {"csv", "json"};
  } outputs;

  void validate() const;
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const RunConfig& cfg);

BasisPtr make_basis(const RunConfig& cfg);

}  // namespace fsir
