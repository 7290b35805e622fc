#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

#include "appsteg/imaging.hpp"

namespace appsteg {

// SRM-mini: a 1014-dimensional subset of the spatial rich model.
//
// Residuals (X is the gray image, each map restricted to its valid support):
//   R1  X[i,j+1] - X[i,j]                           horizontal and vertical maps
//   R2  X[i,j-1] - 2 X[i,j] + X[i,j+1]              horizontal and vertical maps
//   S3  X[i-1,j] + X[i+1,j] + X[i,j-1] + X[i,j+1] - 4 X[i,j]
// Each map is quantized with q in {1, 2} as clamp(round_half_away(r / q), -2, 2).
// Fourth-order co-occurrences of four consecutive values are counted along
// rows and along columns of every map of a residual type, merged into one
// 625-bin histogram, folded under {identity, negation, reversal,
// negation+reversal} to 169 classes and normalized to sum 1.
//
// Block layout: R1/q1, R1/q2, R2/q1, R2/q2, S3/q1, S3/q2.

inline constexpr int kCooccurrenceBins = 625;
inline constexpr int kSymmetryClasses = 169;
inline constexpr int kQuantT = 2;
inline constexpr int kSrmMiniBlocks = 6;
inline constexpr int kSrmMiniDim = kSrmMiniBlocks * kSymmetryClasses;

using FeatureVector = Eigen::VectorXd;

/// Bin of a quantized 4-tuple, each value in [-2, 2].
constexpr int cooccurrence_bin(int a, int b, int c, int d) {
  return (a + kQuantT) * 125 + (b + kQuantT) * 25 + (c + kQuantT) * 5 + (d + kQuantT);
}

/// Symmetry class (0..168) of each of the 625 bins. Classes are numbered in
/// increasing order of their smallest member bin.
const std::array<int, kCooccurrenceBins>& symmetry_class_table();

/// Quantizer used by every residual: clamp(round_half_away(r / q), -2, 2).
int quantize_residual(int residual, int q);

/// Requires a Gray image of at least 3x3; throws std::invalid_argument otherwise.
FeatureVector srm_mini(const PixelImage& gray);

}  // namespace appsteg
