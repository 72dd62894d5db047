#include "fsir/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

namespace fsir {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view s, const char* where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw io_error(std::string(where) + ": bad numeric field '" +
                   std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

}  // namespace

void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot open for writing: " + tmp.string());
    f.write(content.data(),
            static_cast<std::streamsize>(content.size()));
    if (!f) throw io_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw io_error("rename failed: " + tmp.string() + " -> " + path.string() +
                   " (" + ec.message() + ")");
}

std::string dataset_to_csv(const std::vector<Sample>& samples,
                           ObservationDesign design) {
  if (samples.empty()) throw invalid_input("dataset_to_csv: no samples");
  const Eigen::Index width = samples[0].a.size();
  const char* prefix =
      design == ObservationDesign::full_path ? "a_" : "x_";
  std::ostringstream out;
  out << "y";
  for (Eigen::Index i = 1; i <= width; ++i) out << ',' << prefix << i;
  out << '\n';
  for (const Sample& s : samples) {
    if (s.a.size() != width)
      throw invalid_input("dataset_to_csv: ragged sample widths");
    out << format_double(s.y);
    for (Eigen::Index i = 0; i < width; ++i)
      out << ',' << format_double(s.a[i]);
    out << '\n';
  }
  return out.str();
}

CsvDataset dataset_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw io_error("dataset CSV: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "y")
    throw io_error("dataset CSV: header must start with 'y'");
  CsvDataset out;
  const std::string_view first = header[1];
  if (first.rfind("a_", 0) == 0)
    out.design = ObservationDesign::full_path;
  else if (first.rfind("x_", 0) == 0)
    out.design = ObservationDesign::discrete_points;
  else
    throw io_error("dataset CSV: unknown value columns");
  const std::size_t width = header.size() - 1;

  std::vector<double> ys;
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != width + 1)
      throw io_error("dataset CSV: row width mismatch");
    ys.push_back(parse_double(fields[0], "dataset CSV"));
    for (std::size_t k = 1; k < fields.size(); ++k)
      vals.push_back(parse_double(fields[k], "dataset CSV"));
  }
  if (ys.empty()) throw io_error("dataset CSV: no data rows");
  const auto n = static_cast<Eigen::Index>(ys.size());
  out.y.resize(n);
  out.values.resize(n, static_cast<Eigen::Index>(width));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.y[i] = ys[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(width); ++k)
      out.values(i, k) =
          vals[static_cast<std::size_t>(i) * width + static_cast<std::size_t>(k)];
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open: " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CsvDataset load_dataset_csv(const std::filesystem::path& path) {
  return dataset_from_csv(read_text_file(path));
}

nlohmann::json operator_to_json(const SpectralOperator& g) {
  nlohmann::json j;
  j["family"] = to_string(g.basis()->family());
  j["n_basis"] = g.basis()->n_basis();
  j["eigvals"] = std::vector<double>(
      g.eigvals().data(), g.eigvals().data() + g.eigvals().size());
  nlohmann::json vecs = nlohmann::json::array();
  for (int i = 0; i < g.rank(); ++i) {
    const auto col = g.eigvecs().col(i);
    vecs.push_back(std::vector<double>(col.data(), col.data() + col.size()));
  }
  j["eigvecs"] = std::move(vecs);
  return j;
}

SpectralOperator operator_from_json(const nlohmann::json& j, int grid_size,
                                    QuadratureRule rule) {
  for (const auto& [key, _] : j.items())
    if (key != "family" && key != "n_basis" && key != "eigvals" &&
        key != "eigvecs")
      throw io_error("operator JSON: unknown key '" + key + "'");
  if (!j.contains("family") || !j.contains("n_basis") ||
      !j.contains("eigvals") || !j.contains("eigvecs"))
    throw io_error("operator JSON: missing required key");
  const BasisPtr basis =
      BasisSpec::make(basis_family_from_string(j["family"].get<std::string>()),
                      j["n_basis"].get<int>(), grid_size, rule);
  const auto vals = j["eigvals"].get<std::vector<double>>();
  const auto vecs = j["eigvecs"].get<std::vector<std::vector<double>>>();
  if (vals.size() != vecs.size())
    throw io_error("operator JSON: eigval/eigvec count mismatch");
  Eigen::VectorXd ev(static_cast<Eigen::Index>(vals.size()));
  Eigen::MatrixXd vm(basis->n_basis(), static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) {
    ev[static_cast<Eigen::Index>(i)] = vals[i];
    if (vecs[i].size() != static_cast<std::size_t>(basis->n_basis()))
      throw io_error("operator JSON: eigvec length != n_basis");
    for (std::size_t k = 0; k < vecs[i].size(); ++k)
      vm(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          vecs[i][k];
  }
  return SpectralOperator(ev, vm, basis);
}

namespace {

nlohmann::json coef_list(const std::vector<FunctionCoef>& fns) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& f : fns)
    out.push_back(std::vector<double>(f.coef.data(),
                                      f.coef.data() + f.coef.size()));
  return out;
}

}  // namespace

nlohmann::json fsir_result_to_json(const FsirResult& result) {
  nlohmann::json j;
  j["eigvals"] = std::vector<double>(
      result.eigvals.data(), result.eigvals.data() + result.eigvals.size());
  j["betas"] = coef_list(result.betas);
  j["etas"] = coef_list(result.etas);
  j["rank_tol"] = result.rank_tol;
  j["ridge_c"] = result.ridge_c;
  j["rank_deficient"] = result.rank_deficient;
  return j;
}

FsirResult fsir_result_from_json(const nlohmann::json& j, const BasisPtr& b) {
  FsirResult r;
  const auto vals = j.at("eigvals").get<std::vector<double>>();
  r.eigvals.resize(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i)
    r.eigvals[static_cast<Eigen::Index>(i)] = vals[i];
  auto read_coefs = [&](const nlohmann::json& arr) {
    std::vector<FunctionCoef> out;
    for (const auto& row : arr) {
      const auto v = row.get<std::vector<double>>();
      FunctionCoef f;
      f.basis = b;
      f.coef.resize(static_cast<Eigen::Index>(v.size()));
      for (std::size_t k = 0; k < v.size(); ++k)
        f.coef[static_cast<Eigen::Index>(k)] = v[k];
      out.push_back(std::move(f));
    }
    return out;
  };
  r.betas = read_coefs(j.at("betas"));
  r.etas = read_coefs(j.at("etas"));
  r.rank_tol = j.at("rank_tol").get<double>();
  r.ridge_c = j.at("ridge_c").get<double>();
  r.rank_deficient = j.at("rank_deficient").get<bool>();
  return r;
}

nlohmann::json slice_means_to_json(const SliceMeans& means) {
  nlohmann::json j;
  j["weights"] = means.weights;
  j["means"] = coef_list(means.means);
  nlohmann::json alphas = nlohmann::json::array();
  for (const auto& a : means.alphas)
    alphas.push_back(std::vector<double>(a.data(), a.data() + a.size()));
  j["alphas"] = std::move(alphas);
  j["degenerate"] = means.degenerate;
  return j;
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw io_error("invalid JSON in " + path.string());
  return j;
}

void write_json_file(const std::filesystem::path& path,
                     const nlohmann::json& j) {
  atomic_write_file(path, j.dump(2) + "\n");
}

}  // namespace fsir
