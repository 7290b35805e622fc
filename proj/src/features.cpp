#include "appsteg/features.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace appsteg {

namespace {

std::array<int, kCooccurrenceBins> build_class_table() {
  std::array<int, kCooccurrenceBins> canonical{};
  for (int a = -kQuantT; a <= kQuantT; ++a)
    for (int b = -kQuantT; b <= kQuantT; ++b)
      for (int c = -kQuantT; c <= kQuantT; ++c)
        for (int d = -kQuantT; d <= kQuantT; ++d)
          canonical[cooccurrence_bin(a, b, c, d)] =
              std::min({cooccurrence_bin(a, b, c, d), cooccurrence_bin(-a, -b, -c, -d),
                        cooccurrence_bin(d, c, b, a), cooccurrence_bin(-d, -c, -b, -a)});

  std::array<int, kCooccurrenceBins> cls{};
  std::array<int, kCooccurrenceBins> index_of_canonical{};
  index_of_canonical.fill(-1);
  int next = 0;
  for (int bin = 0; bin < kCooccurrenceBins; ++bin) {
    const int rep = canonical[bin];
    if (index_of_canonical[rep] < 0) index_of_canonical[rep] = next++;
    cls[bin] = index_of_canonical[rep];
  }
  if (next != kSymmetryClasses) throw std::logic_error("symmetry class count mismatch");
  return cls;
}

// Quantized residual plane.
struct Plane {
  int rows = 0;
  int cols = 0;
  std::vector<std::int8_t> v;
  std::int8_t at(int i, int j) const { return v[static_cast<std::size_t>(i) * cols + j]; }
};

template <typename F>
Plane make_plane(int rows, int cols, int q, F residual) {
  Plane p;
  if (rows <= 0 || cols <= 0) return p;
  p.rows = rows;
  p.cols = cols;
  p.v.resize(static_cast<std::size_t>(rows) * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      p.v[static_cast<std::size_t>(i) * cols + j] =
          static_cast<std::int8_t>(quantize_residual(residual(i, j), q));
  return p;
}

void accumulate(const Plane& p, std::array<double, kCooccurrenceBins>& hist) {
  for (int i = 0; i < p.rows; ++i)
    for (int j = 0; j + 3 < p.cols; ++j)
      hist[cooccurrence_bin(p.at(i, j), p.at(i, j + 1), p.at(i, j + 2), p.at(i, j + 3))] += 1.0;
  for (int i = 0; i + 3 < p.rows; ++i)
    for (int j = 0; j < p.cols; ++j)
      hist[cooccurrence_bin(p.at(i, j), p.at(i + 1, j), p.at(i + 2, j), p.at(i + 3, j))] += 1.0;
}

}  // namespace

const std::array<int, kCooccurrenceBins>& symmetry_class_table() {
  static const std::array<int, kCooccurrenceBins> table = build_class_table();
  return table;
}

int quantize_residual(int residual, int q) {
  // Integer round-half-away-from-zero of residual / q.
  const int mag = (2 * std::abs(residual) + q) / (2 * q);
  const int r = residual < 0 ? -mag : mag;
  return std::clamp(r, -kQuantT, kQuantT);
}

FeatureVector srm_mini(const PixelImage& gray) {
  if (gray.channels() != Channels::Gray) throw std::invalid_argument("srm_mini needs a Gray image");
  const int h = gray.height(), w = gray.width();
  if (h < 3 || w < 3) throw std::invalid_argument("srm_mini needs at least a 3x3 image");
  auto X = [&](int i, int j) { return static_cast<int>(gray.at(j, i, 0)); };

  const auto& cls = symmetry_class_table();
  FeatureVector f = FeatureVector::Zero(kSrmMiniDim);
  int block = 0;
  for (int type = 0; type < 3; ++type) {
    for (int q : {1, 2}) {
      std::vector<Plane> planes;
      switch (type) {
        case 0:
          planes.push_back(make_plane(h, w - 1, q, [&](int i, int j) { return X(i, j + 1) - X(i, j); }));
          planes.push_back(make_plane(h - 1, w, q, [&](int i, int j) { return X(i + 1, j) - X(i, j); }));
          break;
        case 1:
          planes.push_back(make_plane(h, w - 2, q, [&](int i, int j) {
            return X(i, j) - 2 * X(i, j + 1) + X(i, j + 2);
          }));
          planes.push_back(make_plane(h - 2, w, q, [&](int i, int j) {
            return X(i, j) - 2 * X(i + 1, j) + X(i + 2, j);
          }));
          break;
        default:
          planes.push_back(make_plane(h - 2, w - 2, q, [&](int i, int j) {
            return X(i, j + 1) + X(i + 2, j + 1) + X(i + 1, j) + X(i + 1, j + 2) - 4 * X(i + 1, j + 1);
          }));
          break;
      }
      std::array<double, kCooccurrenceBins> hist{};
      for (const Plane& p : planes) accumulate(p, hist);

      auto out = f.segment(block * kSymmetryClasses, kSymmetryClasses);
      for (int bin = 0; bin < kCooccurrenceBins; ++bin) out[cls[bin]] += hist[bin];
      const double total = out.sum();
      if (total > 0) out /= total;
      ++block;
    }
  }
  return f;
}

}  // namespace appsteg
