#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace appsteg {

using Bytes = std::vector<std::uint8_t>;

enum class Channels : std::uint8_t { Gray = 1, RGB = 3, RGBA = 4 };

constexpr int channel_count(Channels c) { return static_cast<int>(c); }

const char* to_string(Channels c);

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when PNG bytes cannot be decoded at all.
class DecodeError : public ImageError {
 public:
  using ImageError::ImageError;
};

/// Raised for well-formed PNGs outside the supported subset
/// (8-bit, non-interlaced, Gray/RGB/RGBA).
class UnsupportedFormatError : public ImageError {
 public:
  using ImageError::ImageError;
};

/// Row-major 8-bit image with interleaved channels.
class PixelImage {
 public:
  PixelImage(int width, int height, Channels channels);
  PixelImage(int width, int height, Channels channels, Bytes samples);

  int width() const { return width_; }
  int height() const { return height_; }
  Channels channels() const { return channels_; }
  int channel_count() const { return appsteg::channel_count(channels_); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

  std::uint8_t& at(int x, int y, int c) {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * channel_count() + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * channel_count() + c];
  }

  // Addressing by row-major pixel index, as used by embedding paths.
  std::uint8_t& sample(std::size_t pixel, int c) { return samples_[pixel * channel_count() + c]; }
  std::uint8_t sample(std::size_t pixel, int c) const {
    return samples_[pixel * channel_count() + c];
  }

  std::span<const std::uint8_t> samples() const { return samples_; }
  std::span<std::uint8_t> samples() { return samples_; }

  bool operator==(const PixelImage&) const = default;

 private:
  int width_;
  int height_;
  Channels channels_;
  Bytes samples_;
};

PixelImage load_png(std::span<const std::uint8_t> bytes);
Bytes save_png(const PixelImage& img);

PixelImage read_png_file(const std::filesystem::path& path);
void write_png_file(const std::filesystem::path& path, const PixelImage& img);

/// ITU-R 601 luma, rounded half up. Gray input is returned unchanged.
PixelImage to_grayscale(const PixelImage& img);

/// Centered w x h window; offsets are floor((W - w) / 2), floor((H - h) / 2).
PixelImage center_crop(const PixelImage& img, int w, int h);

/// Promotes to RGBA and sets every alpha sample to `value`.
PixelImage force_alpha(const PixelImage& img, std::uint8_t value);

}  // namespace appsteg
