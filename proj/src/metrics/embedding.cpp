#include "panoworld/metrics/embedding.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/geometry/spherical.hpp"

#include <algorithm>
#include <cmath>

namespace panoworld::metrics {

nlohmann::json Embedding::identity() const {
  return {{"name", name()}, {"version", version()}, {"dimension", dimension()}};
}

namespace {

// Source pixel ranges and coverage weights for one output axis.
struct Span {
  int first = 0;
  std::vector<double> weights;
};

std::vector<Span> area_spans(int in, int out) {
  std::vector<Span> spans(static_cast<std::size_t>(out));
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    const double lo = o * scale;
    const double hi = (o + 1) * scale;
    Span& s = spans[static_cast<std::size_t>(o)];
    s.first = static_cast<int>(std::floor(lo));
    const int last = std::min(in - 1, static_cast<int>(std::ceil(hi)) - 1);
    for (int i = s.first; i <= last; ++i) {
      const double w = std::min<double>(hi, i + 1) - std::max<double>(lo, i);
      s.weights.push_back(w / scale);
    }
  }
  return spans;
}

}  // namespace

Image area_resize(const Image& image, int width, int height) {
  if (width < 1 || height < 1) throw Error(ErrorKind::Domain, "resize target must be positive");
  const auto xs = area_spans(image.width(), width);
  const auto ys = area_spans(image.height(), height);
  Image out(width, height);
  for (int y = 0; y < height; ++y) {
    const Span& sy = ys[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) {
      const Span& sx = xs[static_cast<std::size_t>(x)];
      double r = 0.0, g = 0.0, b = 0.0;
      for (std::size_t j = 0; j < sy.weights.size(); ++j) {
        const auto row = image.row(sy.first + static_cast<int>(j));
        for (std::size_t i = 0; i < sx.weights.size(); ++i) {
          const double w = sy.weights[j] * sx.weights[i];
          const Rgb& p = row[static_cast<std::size_t>(sx.first) + i];
          r += w * p.r;
          g += w * p.g;
          b += w * p.b;
        }
      }
      out.at(x, y) = {static_cast<float>(r), static_cast<float>(g), static_cast<float>(b)};
    }
  }
  return out;
}

std::size_t PanoEmbedding::dimension() const {
  return static_cast<std::size_t>(kWidth * kHeight * 3 + (kWidth / kBlock) * (kHeight / kBlock) * kBins);
}

std::vector<double> PanoEmbedding::embed(const Image& image) const {
  const Image small = area_resize(image, kWidth, kHeight);
  std::vector<double> v;
  v.reserve(dimension());
  std::vector<double> luma(static_cast<std::size_t>(kWidth * kHeight));
  for (int y = 0; y < kHeight; ++y) {
    for (int x = 0; x < kWidth; ++x) {
      const Rgb& p = small.at(x, y);
      const double r = p.r, g = p.g, b = p.b;
      const double yy = 0.299 * r + 0.587 * g + 0.114 * b;
      luma[static_cast<std::size_t>(y * kWidth + x)] = yy;
      v.push_back(yy);
      v.push_back(-0.168736 * r - 0.331264 * g + 0.5 * b);
      v.push_back(0.5 * r - 0.418688 * g - 0.081312 * b);
    }
  }
  auto lum = [&](int x, int y) {
    x = (x + kWidth) % kWidth;
    y = std::clamp(y, 0, kHeight - 1);
    return luma[static_cast<std::size_t>(y * kWidth + x)];
  };
  const int bx = kWidth / kBlock;
  const int by = kHeight / kBlock;
  std::vector<double> hist(static_cast<std::size_t>(bx * by * kBins), 0.0);
  for (int y = 0; y < kHeight; ++y) {
    for (int x = 0; x < kWidth; ++x) {
      const double gx = 0.5 * (lum(x + 1, y) - lum(x - 1, y));
      const double gy = 0.5 * (lum(x, y + 1) - lum(x, y - 1));
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      const double a = (std::atan2(gy, gx) + geo::kPi) / geo::kTwoPi;
      const int bin = std::min(kBins - 1, static_cast<int>(a * kBins));
      const std::size_t block = static_cast<std::size_t>((y / kBlock) * bx + x / kBlock);
      hist[block * kBins + static_cast<std::size_t>(bin)] += mag / (kBlock * kBlock);
    }
  }
  v.insert(v.end(), hist.begin(), hist.end());
  return v;
}

const Embedding& default_embedding() {
  static const PanoEmbedding instance;
  return instance;
}

double latent_mse(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "embedding vectors differ in length");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

double latent_mse(const Image& a, const Image& b, const Embedding& embedding) {
  return latent_mse(embedding.embed(a), embedding.embed(b));
}

}  // namespace panoworld::metrics
