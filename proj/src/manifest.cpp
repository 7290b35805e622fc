#include "appsteg/manifest.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "appsteg/embedders.hpp"

namespace appsteg {

const char* to_string(Role role) { return role == Role::Cover ? "cover" : "stego"; }

std::string to_json_line(const ManifestRecord& r) {
  const nlohmann::ordered_json j = {
      {"path", r.path},
      {"role", to_string(r.role)},
      {"app", std::string(to_string(r.app))},
      {"source_id", r.source_id},
      {"target_rate", r.target_rate},
      {"achieved_rate", r.achieved_rate},
      {"message_bytes", r.message_bytes},
      {"password", r.password},
      {"change_rate", r.change_rate},
      {"seed", r.seed},
      {"width", r.width},
      {"height", r.height},
  };
  return j.dump();
}

ManifestRecord record_from_json_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  ManifestRecord r;
  r.path = j.at("path").get<std::string>();
  const auto role = j.at("role").get<std::string>();
  if (role == "cover") r.role = Role::Cover;
  else if (role == "stego") r.role = Role::Stego;
  else throw std::invalid_argument("unknown role '" + role + "'");
  const auto app = parse_app(j.at("app").get<std::string>());
  if (!app) throw std::invalid_argument("unknown app in manifest");
  r.app = *app;
  r.source_id = j.at("source_id").get<std::string>();
  r.target_rate = j.at("target_rate").get<double>();
  r.achieved_rate = j.at("achieved_rate").get<double>();
  r.message_bytes = j.at("message_bytes").get<std::size_t>();
  r.password = j.at("password").get<std::string>();
  r.change_rate = j.at("change_rate").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.width = j.at("width").get<int>();
  r.height = j.at("height").get<int>();
  return r;
}

DatasetManifest read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open manifest " + file.string());
  DatasetManifest m;
  m.root = file.has_parent_path() ? file.parent_path() : std::filesystem::path(".");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      m.records.push_back(record_from_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return m;
}

void write_manifest(const std::filesystem::path& file, const std::vector<ManifestRecord>& records) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  for (const auto& r : records) out << to_json_line(r) << '\n';
  if (!out) throw std::runtime_error("cannot write manifest " + file.string());
}

std::vector<std::string> check_manifest(const DatasetManifest& manifest, const SignatureTable& sigs,
                                        bool check_files) {
  std::vector<std::string> problems;
  std::map<std::pair<std::string, AppId>, const ManifestRecord*> covers;
  for (const auto& r : manifest.records)
    if (r.role == Role::Cover) covers[{r.source_id, r.app}] = &r;

  for (const auto& r : manifest.records) {
    if (check_files && !std::filesystem::exists(manifest.file_of(r)))
      problems.push_back(r.path + ": file missing");
    if (r.role == Role::Cover) continue;

    const auto it = covers.find({r.source_id, r.app});
    if (it == covers.end()) {
      problems.push_back(r.path + ": no cover for source " + r.source_id);
      continue;
    }
    if (it->second->width != r.width || it->second->height != r.height)
      problems.push_back(r.path + ": dimensions differ from cover");
    if (r.achieved_rate > r.target_rate + 1e-12)
      problems.push_back(r.path + ": achieved rate above target");

    const std::size_t pixels = static_cast<std::size_t>(r.width) * r.height;
    const std::size_t cap = pixels * static_cast<std::size_t>(bits_per_pixel(r.app));
    const std::size_t bits = payload_len_bits(r.app, r.message_bytes, r.password.size(), sigs);
    const double expected = static_cast<double>(bits) / static_cast<double>(cap);
    if (std::abs(expected - r.achieved_rate) > 1e-12)
      problems.push_back(r.path + ": achieved rate does not match payload/capacity");
  }
  return problems;
}

}  // namespace appsteg
