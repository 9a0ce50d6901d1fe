#include "dronemap/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace dronemap {
namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::IoError, "read failed for '" + path.string() + "'");
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot create '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::IoError, "write failed for '" + path.string() + "'");
}

bool is_png(const std::vector<unsigned char>& bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

RgbImage decode_png(const std::vector<unsigned char>& bytes, const std::string& name) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(Errc::CorruptFile, name + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  const auto width = static_cast<int>(image.width);
  const auto height = static_cast<int>(image.height);
  if (width < 1 || height < 1) {
    png_image_free(&image);
    throw Error(Errc::CorruptFile, name + ": empty PNG");
  }
  std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::CorruptFile, name + ": " + msg);
  }
  RgbImage out(width, height);
  auto px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = Rgb{buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
  }
  return out;
}

// Netpbm header token reader: skips whitespace and '#' comments.
class PnmHeader {
 public:
  PnmHeader(const std::vector<unsigned char>& bytes, std::string name) : bytes_(bytes), name_(std::move(name)) {}

  int next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(Errc::CorruptFile, name_ + ": malformed netpbm header");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > (1L << 24)) throw Error(Errc::CorruptFile, name_ + ": header value out of range");
    }
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(Errc::CorruptFile, name_ + ": missing raster separator");
    }
    return pos_ + 1;
  }

  void skip(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

RgbImage decode_pnm(const std::vector<unsigned char>& bytes, const std::string& name) {
  const bool color = bytes[1] == '6';
  PnmHeader header(bytes, name);
  header.skip(2);
  const int width = header.next_int();
  const int height = header.next_int();
  const int maxval = header.next_int();
  if (width < 1 || height < 1) throw Error(Errc::CorruptFile, name + ": empty netpbm image");
  if (maxval != 255) throw Error(Errc::UnsupportedFormat, name + ": only maxval 255 is supported");
  const std::size_t offset = header.raster_offset();
  const std::size_t channels = color ? 3 : 1;
  const std::size_t needed = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() < offset + needed) throw Error(Errc::CorruptFile, name + ": truncated raster");

  RgbImage out(width, height);
  auto px = out.pixels();
  const unsigned char* src = bytes.data() + offset;
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = color ? Rgb{src[3 * i], src[3 * i + 1], src[3 * i + 2]} : Rgb{src[i], src[i], src[i]};
  }
  return out;
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

RgbImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const std::string name = path.string();
  if (is_png(bytes)) return decode_png(bytes, name);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) return decode_pnm(bytes, name);
  if (bytes.size() < 8) throw Error(Errc::CorruptFile, name + ": file too short to identify");
  throw Error(Errc::UnsupportedFormat, name + ": not a PNG, PPM (P6) or PGM (P5) file");
}

void save_image(const RgbImage& img, const std::filesystem::path& path) {
  if (img.empty()) throw Error(Errc::DimensionMismatch, "cannot save an empty image");
  const std::string ext = lower_extension(path);
  const auto px = img.pixels();

  if (ext == ".png") {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = PNG_FORMAT_RGB;
    static_assert(sizeof(Rgb) == 3, "Rgb must be tightly packed");
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, px.data(), 0, nullptr)) {
      throw Error(Errc::IoError, path.string() + ": " + image.message);
    }
    return;
  }

  if (ext == ".ppm" || ext == ".pgm") {
    const bool color = ext == ".ppm";
    const std::string header =
        std::string(color ? "P6" : "P5") + "\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
        "\n255\n";
    std::vector<unsigned char> bytes(header.begin(), header.end());
    bytes.reserve(bytes.size() + px.size() * (color ? 3 : 1));
    for (const Rgb& p : px) {
      if (color) {
        bytes.insert(bytes.end(), {p.r, p.g, p.b});
      } else {
        if (p.r != p.g || p.g != p.b) {
          throw Error(Errc::UnsupportedFormat, path.string() + ": PGM output needs a gray-valued image");
        }
        bytes.push_back(p.r);
      }
    }
    write_file(path, bytes);
    return;
  }

  throw Error(Errc::UnsupportedFormat, path.string() + ": unknown image extension '" + ext + "'");
}

}  // namespace dronemap
