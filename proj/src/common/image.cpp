#include "panoworld/common/image.hpp"

#include "panoworld/common/error.hpp"

#include <algorithm>
#include <string>

namespace panoworld {

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::Domain,
                "image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

bool Image::channels_valid() const {
  return std::all_of(pixels_.begin(), pixels_.end(), [](const Rgb& p) {
    return p.r >= 0.0f && p.r <= 1.0f && p.g >= 0.0f && p.g <= 1.0f && p.b >= 0.0f && p.b <= 1.0f;
  });
}

std::uint64_t digest(const Image& image) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const int dims[2] = {image.width(), image.height()};
  mix(dims, sizeof(dims));
  const auto px = image.pixels();
  mix(px.data(), px.size_bytes());
  return h;
}

}  // namespace panoworld
