#include "appsteg/feature_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "appsteg/parallel.hpp"

namespace appsteg {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table) {
  if (table.ids.size() != static_cast<std::size_t>(table.rows.rows()) ||
      table.labels.size() != table.ids.size())
    throw std::invalid_argument("feature table columns disagree in length");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << "id,label";
  for (Eigen::Index j = 0; j < table.rows.cols(); ++j) out << ",f" << j;
  out << '\n';
  char buf[40];
  for (std::size_t i = 0; i < table.ids.size(); ++i) {
    if (table.ids[i].find(',') != std::string::npos)
      throw std::invalid_argument("feature id contains a comma: " + table.ids[i]);
    out << table.ids[i] << ',';
    if (table.labels[i] >= 0) out << table.labels[i];
    for (Eigen::Index j = 0; j < table.rows.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), ",%.17g", table.rows(static_cast<Eigen::Index>(i), j));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

FeatureTable read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open feature file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty feature file");
  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "label")
    throw std::runtime_error(path.string() + ": header must start with id,label");
  const std::size_t dim = header.size() - 2;

  FeatureTable t;
  std::vector<double> values;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != dim + 2)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(dim + 2) + " fields");
    t.ids.push_back(cells[0]);
    t.labels.push_back(cells[1].empty() ? -1 : std::stoi(cells[1]));
    for (std::size_t j = 0; j < dim; ++j) {
      // strtod round-trips the %.17g output exactly.
      char* end = nullptr;
      const double v = std::strtod(cells[j + 2].c_str(), &end);
      if (end == cells[j + 2].c_str())
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad number");
      values.push_back(v);
    }
  }
  t.rows = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(t.ids.size()), static_cast<Eigen::Index>(dim));
  return t;
}

FeatureVector image_features(const PixelImage& img) { return srm_mini(to_grayscale(img)); }

FeatureTable features_from_manifest(const DatasetManifest& manifest, std::optional<AppId> app,
                                    int threads) {
  std::vector<const ManifestRecord*> picked;
  for (const auto& r : manifest.records)
    if (!app || r.app == *app) picked.push_back(&r);

  FeatureTable t;
  t.rows.resize(static_cast<Eigen::Index>(picked.size()), kSrmMiniDim);
  parallel_for(picked.size(), threads, [&](std::size_t i) {
    t.rows.row(static_cast<Eigen::Index>(i)) =
        image_features(read_png_file(manifest.file_of(*picked[i]))).transpose();
  });
  for (const auto* r : picked) {
    t.ids.push_back(r->path);
    t.labels.push_back(r->role == Role::Stego ? 1 : 0);
  }
  return t;
}

}  // namespace appsteg
