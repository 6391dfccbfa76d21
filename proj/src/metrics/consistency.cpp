#include "panoworld/metrics/consistency.hpp"

#include "panoworld/common/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace panoworld::metrics {

geo::Rotation random_rotation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-geo::kPi, geo::kPi);
  std::uniform_real_distribution<double> cosine(-1.0, 1.0);
  const double a = angle(rng);
  const double b = std::acos(cosine(rng));
  const double c = angle(rng);
  return geo::Rotation::yaw(a).then(geo::Rotation::pitch(b)).then(geo::Rotation::yaw(c));
}

double scl_consistency(const std::vector<Panorama>& generated, const std::vector<Panorama>& truth,
                       const SclOptions& options, const Embedding& embedding) {
  if (generated.size() != truth.size()) {
    throw Error(ErrorKind::DimensionMismatch, "frame counts differ");
  }
  if (generated.empty()) throw Error(ErrorKind::Domain, "empty video");
  if (options.n_rotations < 1) throw Error(ErrorKind::Domain, "n_rotations must be positive");
  for (std::size_t i = 0; i < generated.size(); ++i) {
    if (generated[i].width() != truth[i].width() || generated[i].height() != truth[i].height()) {
      throw Error(ErrorKind::DimensionMismatch, "frame " + std::to_string(i) + " sizes differ");
    }
  }
  std::mt19937_64 rng(options.seed);
  double total = 0.0;
  for (int r = 0; r < options.n_rotations; ++r) {
    const geo::Rotation rot = random_rotation(rng);
    double per_rotation = 0.0;
    for (std::size_t i = 0; i < generated.size(); ++i) {
      per_rotation += latent_mse(geo::rotate_panorama(generated[i], rot, options.interp),
                                 geo::rotate_panorama(truth[i], rot, options.interp), embedding);
    }
    total += per_rotation / static_cast<double>(generated.size());
  }
  return total / options.n_rotations;
}

namespace {

double column_gap(const Panorama& p, int a, int b) {
  double s = 0.0;
  for (int y = 0; y < p.height(); ++y) {
    const Rgb& x = p.at(a, y);
    const Rgb& z = p.at(b, y);
    s += std::abs(static_cast<double>(x.r) - z.r) + std::abs(static_cast<double>(x.g) - z.g) +
         std::abs(static_cast<double>(x.b) - z.b);
  }
  return s / (3.0 * p.height());
}

}  // namespace

double seam_continuity(const Panorama& pano) {
  if (pano.width() < 3) throw Error(ErrorKind::Domain, "seam continuity needs at least 3 columns");
  const double seam = column_gap(pano, pano.width() - 1, 0);
  double interior = 0.0;
  for (int x = 0; x + 1 < pano.width(); ++x) interior += column_gap(pano, x, x + 1);
  interior /= pano.width() - 1;
  if (interior == 0.0) return seam == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return seam / interior;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::DimensionMismatch, "spearman needs two equal-length samples of size >= 2");
  }
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace panoworld::metrics
