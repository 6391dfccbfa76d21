#include "panoworld/metrics/image_quality.hpp"

#include "panoworld/common/error.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace panoworld::metrics {

namespace {

void require_same_size(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorKind::DimensionMismatch, "image sizes differ: " + std::to_string(a.width()) + "x" +
                                                  std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                                                  "x" + std::to_string(b.height()));
  }
  if (a.empty()) throw Error(ErrorKind::Domain, "empty image");
}

float channel(const Rgb& p, int c) { return c == 0 ? p.r : (c == 1 ? p.g : p.b); }

}  // namespace

double mse(const Image& a, const Image& b, Exec exec) {
  require_same_size(a, b);
  const int h = a.height();
  std::vector<double> row_sums(static_cast<std::size_t>(h), 0.0);
#pragma omp parallel for if (exec == Exec::Parallel)
  for (int y = 0; y < h; ++y) {
    const auto ra = a.row(y);
    const auto rb = b.row(y);
    double s = 0.0;
    for (std::size_t x = 0; x < ra.size(); ++x) {
      const double dr = static_cast<double>(ra[x].r) - rb[x].r;
      const double dg = static_cast<double>(ra[x].g) - rb[x].g;
      const double db = static_cast<double>(ra[x].b) - rb[x].b;
      s += dr * dr + dg * dg + db * db;
    }
    row_sums[static_cast<std::size_t>(y)] = s;
  }
  double total = 0.0;
  for (double s : row_sums) total += s;
  return total / (3.0 * static_cast<double>(a.size()));
}

double psnr(const Image& a, const Image& b, Exec exec) {
  const double m = mse(a, b, exec);
  if (m == 0.0) return kPsnrInfinite;
  return 10.0 * std::log10(1.0 / m);
}

double ssim(const Image& a, const Image& b, const SsimOptions& opt, Exec exec) {
  require_same_size(a, b);
  const int n = opt.window;
  if (n < 1 || n % 2 == 0) throw Error(ErrorKind::Domain, "SSIM window must be odd and positive");
  if (a.width() < n || a.height() < n) throw Error(ErrorKind::Domain, "image smaller than the SSIM window");

  std::vector<double> g(static_cast<std::size_t>(n));
  double gsum = 0.0;
  const int r = n / 2;
  for (int i = 0; i < n; ++i) {
    g[static_cast<std::size_t>(i)] = std::exp(-0.5 * (i - r) * (i - r) / (opt.sigma * opt.sigma));
    gsum += g[static_cast<std::size_t>(i)];
  }
  for (double& v : g) v /= gsum;

  const double c1 = (opt.k1 * opt.data_range) * (opt.k1 * opt.data_range);
  const double c2 = (opt.k2 * opt.data_range) * (opt.k2 * opt.data_range);
  const int w = a.width(), h = a.height();
  const int ow = w - n + 1, oh = h - n + 1;

  double channel_total = 0.0;
  for (int c = 0; c < 3; ++c) {
    // Horizontal pass over the five moment images; the vertical pass reads it.
    std::vector<double> hx(static_cast<std::size_t>(5) * h * ow);
    auto hidx = [&](int k, int y, int x) { return (static_cast<std::size_t>(k) * h + y) * ow + x; };
#pragma omp parallel for if (exec == Exec::Parallel)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < ow; ++x) {
        double m[5] = {0, 0, 0, 0, 0};
        for (int i = 0; i < n; ++i) {
          const double va = channel(a.at(x + i, y), c);
          const double vb = channel(b.at(x + i, y), c);
          const double wi = g[static_cast<std::size_t>(i)];
          m[0] += wi * va;
          m[1] += wi * vb;
          m[2] += wi * va * va;
          m[3] += wi * vb * vb;
          m[4] += wi * va * vb;
        }
        for (int k = 0; k < 5; ++k) hx[hidx(k, y, x)] = m[k];
      }
    }
    std::vector<double> row_sums(static_cast<std::size_t>(oh), 0.0);
#pragma omp parallel for if (exec == Exec::Parallel)
    for (int y = 0; y < oh; ++y) {
      double s = 0.0;
      for (int x = 0; x < ow; ++x) {
        double m[5] = {0, 0, 0, 0, 0};
        for (int i = 0; i < n; ++i) {
          const double wi = g[static_cast<std::size_t>(i)];
          for (int k = 0; k < 5; ++k) m[k] += wi * hx[hidx(k, y + i, x)];
        }
        const double va = m[2] - m[0] * m[0];
        const double vb = m[3] - m[1] * m[1];
        const double cov = m[4] - m[0] * m[1];
        s += ((2 * m[0] * m[1] + c1) * (2 * cov + c2)) / ((m[0] * m[0] + m[1] * m[1] + c1) * (va + vb + c2));
      }
      row_sums[static_cast<std::size_t>(y)] = s;
    }
    double total = 0.0;
    for (double s : row_sums) total += s;
    channel_total += total / (static_cast<double>(ow) * oh);
  }
  return channel_total / 3.0;
}

}  // namespace panoworld::metrics
