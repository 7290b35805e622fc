#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "appsteg/payload.hpp"

namespace appsteg {

enum class Role { Cover, Stego };

const char* to_string(Role role);

/// One generated image. Serialized as one JSON object per line with exactly
/// these field names. `path` is relative to the manifest's directory.
struct ManifestRecord {
  std::string path;
  Role role = Role::Cover;
  AppId app = AppId::StegM;
  std::string source_id;
  double target_rate = 0.0;
  double achieved_rate = 0.0;
  std::size_t message_bytes = 0;
  std::string password;
  double change_rate = 0.0;
  std::uint64_t seed = 0;
  int width = 0;
  int height = 0;

  bool operator==(const ManifestRecord&) const = default;
};

struct DatasetManifest {
  /// Directory that record paths are relative to.
  std::filesystem::path root;
  std::vector<ManifestRecord> records;

  std::filesystem::path file_of(const ManifestRecord& r) const { return root / r.path; }
};

std::string to_json_line(const ManifestRecord& record);
ManifestRecord record_from_json_line(const std::string& line);

/// Reads a JSONL manifest; root becomes the file's directory.
DatasetManifest read_manifest(const std::filesystem::path& file);
void write_manifest(const std::filesystem::path& file, const std::vector<ManifestRecord>& records);

/// Referential and arithmetic checks: every stego has a cover with the same
/// source_id and app, achieved <= target, achieved equals the payload length
/// recomputed from stored fields over capacity, and (if check_files) every
/// file exists. Returns one message per problem.
std::vector<std::string> check_manifest(const DatasetManifest& manifest, const SignatureTable& sigs,
                                        bool check_files = true);

}  // namespace appsteg
