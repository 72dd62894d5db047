#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fsir/estimate.hpp"
#include "fsir/simulate.hpp"

namespace fsir {

// Shortest round-trip decimal representation.
std::string format_double(double x);

// Writes to "<path>.tmp" in the same directory, then renames, so a
// failed run never leaves a partial output at the final path.
void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content);

// --- dataset CSV -----------------------------------------------------------

// Header y,a_1..a_N (full-path coefficients) or y,x_1..x_q (discrete
// observations); one row per sample.
std::string dataset_to_csv(const std::vector<Sample>& samples,
                           ObservationDesign design);

struct CsvDataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd values;
  ObservationDesign design = ObservationDesign::full_path;
};

CsvDataset dataset_from_csv(const std::string& text);
CsvDataset load_dataset_csv(const std::filesystem::path& path);

// --- operator JSON ---------------------------------------------------------

nlohmann::json operator_to_json(const SpectralOperator& g);
SpectralOperator operator_from_json(const nlohmann::json& j,
                                    int grid_size = 512,
                                    QuadratureRule rule =
                                        QuadratureRule::trapezoid);

// --- result / slice-mean JSON ----------------------------------------------

nlohmann::json fsir_result_to_json(const FsirResult& result);
nlohmann::json slice_means_to_json(const SliceMeans& means);
FsirResult fsir_result_from_json(const nlohmann::json& j, const BasisPtr& b);

std::string read_text_file(const std::filesystem::path& path);
nlohmann::json load_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path,
                     const nlohmann::json& j);

}  // namespace fsir
