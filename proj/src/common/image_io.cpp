#include "panoworld/common/image_io.hpp"

#include "panoworld/common/error.hpp"

#include <png.h>

#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace panoworld::io {

namespace {

std::uint8_t to_byte(float v) { return static_cast<std::uint8_t>(std::lround(clamp01(v) * 255.0f)); }

}  // namespace

Bytes encode_png(const Image& image) {
  std::vector<png_byte> raw(image.size() * 3);
  const auto px = image.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    raw[3 * i + 0] = to_byte(px[i].r);
    raw[3 * i + 1] = to_byte(px[i].g);
    raw[3 * i + 2] = to_byte(px[i].b);
  }
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(image.width());
  desc.height = static_cast<png_uint_32>(image.height());
  desc.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&desc, nullptr, &size, 0, raw.data(), 0, nullptr)) {
    throw Error(ErrorKind::Io, std::string("png encode: ") + desc.message);
  }
  Bytes out(size);
  if (!png_image_write_to_memory(&desc, out.data(), &size, 0, raw.data(), 0, nullptr)) {
    throw Error(ErrorKind::Io, std::string("png encode: ") + desc.message);
  }
  out.resize(size);
  return out;
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&desc, bytes.data(), bytes.size())) {
    throw Error(ErrorKind::Protocol, std::string("png decode: ") + desc.message);
  }
  desc.format = PNG_FORMAT_RGB;
  std::vector<png_byte> raw(PNG_IMAGE_SIZE(desc));
  if (!png_image_finish_read(&desc, nullptr, raw.data(), 0, nullptr)) {
    png_image_free(&desc);
    throw Error(ErrorKind::Protocol, std::string("png decode: ") + desc.message);
  }
  Image image(static_cast<int>(desc.width), static_cast<int>(desc.height));
  auto px = image.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = {raw[3 * i] / 255.0f, raw[3 * i + 1] / 255.0f, raw[3 * i + 2] / 255.0f};
  }
  return image;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  const Bytes bytes = encode_png(image);
  write_file(path, bytes);
}

Image read_png(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  return decode_png(bytes);
}

void write_panorama(const std::filesystem::path& path, const Panorama& pano) {
  write_png(path, pano);
  std::ostringstream meta;
  meta << "{\n  \"schema\": \"panoworld.panorama/1\",\n"
       << "  \"width\": " << pano.width() << ",\n"
       << "  \"height\": " << pano.height() << ",\n"
       << "  \"projection\": \"equirectangular\",\n"
       << "  \"spherical\": " << (pano.is_spherical() ? "true" : "false") << "\n}\n";
  auto sidecar = path;
  sidecar.replace_extension(".json");
  write_text(sidecar, meta.str());
}

namespace {

void write_pfm_impl(const std::filesystem::path& path, int width, int height, int channels,
                    const std::vector<float>& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << (channels == 3 ? "PF" : "Pf") << "\n" << width << " " << height << "\n-1.0\n";
  // PFM stores rows bottom-to-top.
  const std::size_t row_floats = static_cast<std::size_t>(width) * channels;
  for (int y = height - 1; y >= 0; --y) {
    out.write(reinterpret_cast<const char*>(data.data() + y * row_floats),
              static_cast<std::streamsize>(row_floats * sizeof(float)));
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::vector<float> read_pfm_impl(const std::filesystem::path& path, int& width, int& height,
                                 int& channels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string magic;
  double scale = 0.0;
  in >> magic >> width >> height >> scale;
  in.get();
  if (magic == "PF") {
    channels = 3;
  } else if (magic == "Pf") {
    channels = 1;
  } else {
    throw Error(ErrorKind::Protocol, "not a PFM file: " + path.string());
  }
  if (scale >= 0.0) throw Error(ErrorKind::Protocol, "big-endian PFM unsupported");
  if (width < 1 || height < 1) throw Error(ErrorKind::Protocol, "bad PFM dimensions");
  const std::size_t row_floats = static_cast<std::size_t>(width) * channels;
  std::vector<float> data(row_floats * height);
  for (int y = height - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(data.data() + y * row_floats),
            static_cast<std::streamsize>(row_floats * sizeof(float)));
  }
  if (!in) throw Error(ErrorKind::Protocol, "truncated PFM: " + path.string());
  return data;
}

}  // namespace

void write_pfm(const std::filesystem::path& path, const Image& image) {
  std::vector<float> data;
  data.reserve(image.size() * 3);
  for (const Rgb& p : image.pixels()) {
    data.push_back(p.r);
    data.push_back(p.g);
    data.push_back(p.b);
  }
  write_pfm_impl(path, image.width(), image.height(), 3, data);
}

Image read_pfm(const std::filesystem::path& path) {
  int width = 0, height = 0, channels = 0;
  const auto data = read_pfm_impl(path, width, height, channels);
  if (channels != 3) throw Error(ErrorKind::Protocol, "expected RGB PFM: " + path.string());
  Image image(width, height);
  auto px = image.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = {data[3 * i], data[3 * i + 1], data[3 * i + 2]};
  return image;
}

void write_pfm(const std::filesystem::path& path, const ScalarMap& map) {
  std::vector<float> data(map.values().begin(), map.values().end());
  write_pfm_impl(path, map.width(), map.height(), 1, data);
}

ScalarMap read_pfm_scalar(const std::filesystem::path& path) {
  int width = 0, height = 0, channels = 0;
  const auto data = read_pfm_impl(path, width, height, channels);
  if (channels != 1) throw Error(ErrorKind::Protocol, "expected scalar PFM: " + path.string());
  ScalarMap map(width, height);
  std::copy(data.begin(), data.end(), map.values().begin());
  return map;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::string read_text(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  return {bytes.begin(), bytes.end()};
}

namespace {
constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += kAlphabet[n & 63];
  }
  if (i + 1 == bytes.size()) {
    const std::uint32_t n = bytes[i] << 16;
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += '=';
  }
  return out;
}

Bytes base64_decode(std::string_view text) {
  std::array<int, 256> table{};
  table.fill(-1);
  for (std::size_t i = 0; i < kAlphabet.size(); ++i) table[static_cast<unsigned char>(kAlphabet[i])] = static_cast<int>(i);
  Bytes out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    const int v = table[static_cast<unsigned char>(c)];
    if (v < 0) throw Error(ErrorKind::Protocol, "invalid base64 character");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

}  // namespace panoworld::io
