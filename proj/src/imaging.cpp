#include "appsteg/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>

namespace appsteg {

const char* to_string(Channels c) {
  switch (c) {
    case Channels::Gray: return "gray";
    case Channels::RGB: return "rgb";
    case Channels::RGBA: return "rgba";
  }
  return "?";
}

PixelImage::PixelImage(int width, int height, Channels channels)
    : width_(width), height_(height), channels_(channels) {
  if (width < 1 || height < 1) throw std::invalid_argument("image dimensions must be positive");
  samples_.assign(pixel_count() * appsteg::channel_count(channels), 0);
}

PixelImage::PixelImage(int width, int height, Channels channels, Bytes samples)
    : width_(width), height_(height), channels_(channels), samples_(std::move(samples)) {
  if (width < 1 || height < 1) throw std::invalid_argument("image dimensions must be positive");
  if (samples_.size() != pixel_count() * appsteg::channel_count(channels))
    throw std::invalid_argument("sample count does not match width * height * channels");
}

namespace {

struct MemoryReader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t offset;
};

struct ReadState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  MemoryReader reader{};
  char message[256] = {};

  ~ReadState() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

void read_from_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* r = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (count > r->size - r->offset) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, r->data + r->offset, count);
  r->offset += count;
}

void on_png_error(png_structp png, png_const_charp msg) {
  auto* state = static_cast<ReadState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

}  // namespace

PixelImage load_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
    throw DecodeError("not a PNG stream");

  // Heap state so nothing the longjmp path touches lives in a register.
  auto state = std::make_unique<ReadState>();
  ReadState* const s = state.get();
  s->png = png_create_read_struct(PNG_LIBPNG_VER_STRING, s, on_png_error, on_png_warning);
  if (!s->png) throw DecodeError("png_create_read_struct failed");
  s->info = png_create_info_struct(s->png);
  if (!s->info) throw DecodeError("png_create_info_struct failed");
  s->reader = MemoryReader{bytes.data(), bytes.size(), 0};

  std::unique_ptr<PixelImage> out;
  std::unique_ptr<PixelImage>* const out_ptr = &out;

  if (setjmp(png_jmpbuf(s->png))) {
    throw DecodeError(std::string("PNG decode failed: ") + s->message);
  }

  png_set_read_fn(s->png, &s->reader, read_from_memory);
  png_read_info(s->png, s->info);

  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0, interlace = 0;
  png_get_IHDR(s->png, s->info, &width, &height, &bit_depth, &color_type, &interlace, nullptr,
               nullptr);
  if (bit_depth != 8)
    throw UnsupportedFormatError("unsupported PNG bit depth " + std::to_string(bit_depth));
  if (interlace != PNG_INTERLACE_NONE) throw UnsupportedFormatError("interlaced PNG not supported");

  Channels channels;
  switch (color_type) {
    case PNG_COLOR_TYPE_GRAY: channels = Channels::Gray; break;
    case PNG_COLOR_TYPE_RGB: channels = Channels::RGB; break;
    case PNG_COLOR_TYPE_RGB_ALPHA: channels = Channels::RGBA; break;
    case PNG_COLOR_TYPE_PALETTE: throw UnsupportedFormatError("palette PNG not supported");
    default:
      throw UnsupportedFormatError("unsupported PNG color type " + std::to_string(color_type));
  }
  if (width > 1u << 16 || height > 1u << 16) throw UnsupportedFormatError("PNG too large");

  *out_ptr = std::make_unique<PixelImage>(static_cast<int>(width), static_cast<int>(height),
                                          channels);
  const std::size_t stride = static_cast<std::size_t>(width) * channel_count(channels);
  if (png_get_rowbytes(s->png, s->info) != stride) throw DecodeError("unexpected PNG row size");
  std::uint8_t* base = (*out_ptr)->samples().data();
  for (png_uint_32 y = 0; y < height; ++y) png_read_row(s->png, base + y * stride, nullptr);
  png_read_end(s->png, nullptr);

  return std::move(**out_ptr);
}

Bytes save_png(const PixelImage& img) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  switch (img.channels()) {
    case Channels::Gray: image.format = PNG_FORMAT_GRAY; break;
    case Channels::RGB: image.format = PNG_FORMAT_RGB; break;
    case Channels::RGBA: image.format = PNG_FORMAT_RGBA; break;
  }

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.samples().data(), 0, nullptr))
    throw ImageError(std::string("PNG encode failed: ") + image.message);
  Bytes out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.samples().data(), 0, nullptr))
    throw ImageError(std::string("PNG encode failed: ") + image.message);
  out.resize(size);
  return out;
}

PixelImage read_png_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError("cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return load_png(bytes);
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what());
  } catch (const UnsupportedFormatError& e) {
    throw UnsupportedFormatError(path.string() + ": " + e.what());
  }
}

void write_png_file(const std::filesystem::path& path, const PixelImage& img) {
  const Bytes bytes = save_png(img);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ImageError("cannot write " + path.string());
}

PixelImage to_grayscale(const PixelImage& img) {
  if (img.channels() == Channels::Gray) return img;
  PixelImage out(img.width(), img.height(), Channels::Gray);
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const unsigned r = img.sample(p, 0), g = img.sample(p, 1), b = img.sample(p, 2);
    // Integer weights in thousandths keep round-half-up exact.
    out.sample(p, 0) = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
  }
  return out;
}

PixelImage center_crop(const PixelImage& img, int w, int h) {
  if (w < 1 || h < 1 || w > img.width() || h > img.height())
    throw std::invalid_argument("crop " + std::to_string(w) + "x" + std::to_string(h) +
                                " does not fit in " + std::to_string(img.width()) + "x" +
                                std::to_string(img.height()));
  const int x0 = (img.width() - w) / 2;
  const int y0 = (img.height() - h) / 2;
  const int nc = img.channel_count();
  PixelImage out(w, h, img.channels());
  for (int y = 0; y < h; ++y) {
    const auto src = img.samples().subspan(
        (static_cast<std::size_t>(y0 + y) * img.width() + x0) * nc, static_cast<std::size_t>(w) * nc);
    std::copy(src.begin(), src.end(),
              out.samples().begin() + static_cast<std::ptrdiff_t>(y) * w * nc);
  }
  return out;
}

PixelImage force_alpha(const PixelImage& img, std::uint8_t value) {
  PixelImage out(img.width(), img.height(), Channels::RGBA);
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    for (int c = 0; c < 3; ++c)
      out.sample(p, c) = img.channels() == Channels::Gray ? img.sample(p, 0) : img.sample(p, c);
    out.sample(p, 3) = value;
  }
  return out;
}

}  // namespace appsteg
