#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "appsteg/features.hpp"
#include "appsteg/manifest.hpp"

namespace appsteg {

/// Labeled feature rows. Labels: 0 cover, 1 stego, -1 unknown.
struct FeatureTable {
  std::vector<std::string> ids;
  std::vector<int> labels;
  Eigen::MatrixXd rows;
};

/// CSV with header `id,label,f0,...,f<d-1>`; values use 17 significant digits
/// so a reload is exact. An empty label field reads back as -1.
void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table);
FeatureTable read_feature_csv(const std::filesystem::path& path);

/// srm_mini of the image's grayscale conversion.
FeatureVector image_features(const PixelImage& img);

/// Features for every manifest record (optionally one app only); ids are the
/// record paths, labels follow the record role.
FeatureTable features_from_manifest(const DatasetManifest& manifest, std::optional<AppId> app,
                                    int threads = 1);

}  // namespace appsteg
