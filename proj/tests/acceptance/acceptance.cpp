// Acceptance checks: one PASS/FAIL line per primary criterion. Exit status is
// the number of failed criteria.

#include "golden.hpp"
#include "patterns.hpp"
#include "reference_metrics.hpp"

#include "panoworld/belief/policy.hpp"
#include "panoworld/belief/update.hpp"
#include "panoworld/eqa/evaluate.hpp"
#include "panoworld/eqa/suite.hpp"
#include "panoworld/geometry/cubemap.hpp"
#include "panoworld/geometry/rotation.hpp"
#include "panoworld/geometry/spherical.hpp"
#include "panoworld/metrics/consistency.hpp"
#include "panoworld/metrics/ielc.hpp"
#include "panoworld/metrics/image_quality.hpp"
#include "panoworld/service/pointcloud.hpp"
#include "panoworld/world/render.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

namespace pw = panoworld;
using pw::Panorama;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void check(const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %-22s %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), s);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome coordinate_round_trip() {
  const int w = 2048, h = 1024;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, w), v(0.0, h);
  std::uniform_real_distribution<double> phi(-pw::geo::kPi, pw::geo::kPi), theta(-pw::geo::kHalfPi, pw::geo::kHalfPi);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const pw::geo::PixelCoord p{u(rng), v(rng)};
    const pw::geo::PixelCoord q = pw::geo::sphere_to_pixel(pw::geo::pixel_to_sphere(p, w, h), w, h);
    // Pixel error expressed as an angle.
    worst = std::max({worst, std::abs(q.u - p.u) * pw::geo::kTwoPi / w, std::abs(q.v - p.v) * pw::geo::kPi / h});
    const pw::geo::SphericalCoord c{phi(rng), theta(rng)};
    const pw::geo::SphericalCoord b = pw::geo::pixel_to_sphere(pw::geo::sphere_to_pixel(c, w, h), w, h);
    worst = std::max({worst, std::abs(b.phi - c.phi), std::abs(b.theta - c.theta)});
  }
  const double s = seconds_since(t0);
  return {worst < 1e-9 && s < 1.0, fmt("max error %.3g rad (< 1e-9), %.3f s (< 1 s)", worst, s)};
}

Outcome rotation_exactness() {
  bool exact = true;
  const Panorama r = pw::testing::random_image(4, 256, 128);
  for (int a : {1, 7, 64, 129, -200}) {
    const pw::geo::RotationSpec fwd{pw::geo::kTwoPi * a / 256, 0.0};
    exact = exact && pw::geo::rotate_panorama(pw::geo::rotate_panorama(r, fwd), pw::geo::RotationSpec{-fwd.delta_phi, 0.0}) == r;
  }
  double worst = 1e9;
  const pw::geo::RotationSpec tilted{0.37, 0.21, pw::geo::RotationMode::Full3d};
  const pw::geo::Rotation inverse = pw::geo::Rotation::from_spec(tilted).inverse();
  for (const Panorama& x : pw::testing::pattern_corpus(2048, 1024)) {
    worst = std::min(worst, pw::metrics::psnr(x, pw::geo::rotate_panorama(pw::geo::rotate_panorama(x, tilted), inverse)));
  }
  return {exact && worst > 35.0,
          fmt("integer yaw bit-exact: %s; full-3d min PSNR %.2f dB (> 35) at W=2048", exact ? "yes" : "no", worst)};
}

Outcome cubemap_round_trip() {
  const int w = 512, h = 256;
  double worst_half = 1e9;
  bool monotone = true;
  for (const Panorama& x : pw::testing::pattern_corpus(w, h)) {
    double prev = 0.0;
    for (int n : {h / 2, h, 2 * h}) {
      const double q = pw::metrics::psnr(x, pw::geo::cubemap_to_panorama(pw::geo::panorama_to_cubemap(x, n), w, h));
      monotone = monotone && q >= prev;
      prev = q;
      if (n == w / 2) worst_half = std::min(worst_half, q);
    }
  }
  return {worst_half > 40.0 && monotone,
          fmt("min PSNR at W/2 %.2f dB (> 40); non-decreasing over {H/2,H,2H}: %s", worst_half, monotone ? "yes" : "no")};
}

Outcome oracle_ielc() {
  pw::metrics::IelcOptions o;
  o.n_loops = 1000;
  o.width = 512;
  o.height = 256;
  o.seed = 1;
  const pw::metrics::IelcReport r = pw::metrics::run_ielc(pw::explore::GeneratorSpec{}, o);
  int max_rot = 0;
  double max_dist = 0.0;
  for (const auto& l : r.loops) {
    if (l.filtered) continue;
    max_rot = std::max(max_rot, l.rotation_count);
    max_dist = std::max(max_dist, l.total_distance);
  }
  const bool shape = max_rot <= 9 && max_dist <= 20.0 + 1e-9;
  return {r.mean < 1e-6 && !r.partial && shape && r.seconds < 300.0,
          fmt("IELC %.3g (< 1e-6) over %d valid loops (%d filtered), <= %d rotations, <= %.1f m, %.1f s (< 300 s)",
              r.mean, r.valid, r.filtered, max_rot, max_dist, r.seconds)};
}

Outcome noise_ordering() {
  const std::vector<double> sigmas{0.01, 0.02, 0.05, 0.1, 0.2};
  std::vector<double> ielc;
  for (double sigma : sigmas) {
    pw::explore::GeneratorSpec spec;
    spec.kind = "noisy-oracle";
    spec.sigma = sigma;
    pw::metrics::IelcOptions o;
    o.n_loops = 100;
    o.width = 256;
    o.height = 128;
    o.seed = 3;
    ielc.push_back(pw::metrics::run_ielc(spec, o).mean);
  }
  // sigma 0.02, 0.05, 0.10 are entries 1..3.
  const bool increasing = ielc[1] < ielc[2] && ielc[2] < ielc[3];
  const double rho = pw::metrics::spearman(sigmas, ielc);
  std::ostringstream os;
  for (std::size_t i = 0; i < sigmas.size(); ++i) os << (i ? ", " : "") << sigmas[i] << ":" << ielc[i];
  return {increasing && rho > 0.9,
          fmt("strictly increasing over 0.02/0.05/0.10: %s; Spearman %.3f (> 0.9) over 5 levels {%s}",
              increasing ? "yes" : "no", rho, os.str().c_str())};
}

// A wall at x = 4 hides an ambulance slot from the origin; (6, -2) sees it.
std::shared_ptr<const pw::belief::HypothesisSpace> occluded_space(double ax, double az) {
  pw::world::Scene base = pw::testing::empty_scene();
  base.ground.tile_size = 2.0;
  base.primitives.push_back(
      {pw::world::PrimitiveKind::Box, {4.0, 1.5, 2.25}, {0.5, 3.0, 5.5}, {0.6f, 0.55f, 0.5f}, "wall"});
  const pw::world::Primitive ambulance{pw::world::PrimitiveKind::Box, {ax, 1.0, az}, {3.0, 2.0, 2.0},
                                       {0.95f, 0.95f, 0.95f}, "ambulance"};
  pw::world::Primitive siren{pw::world::PrimitiveKind::Box, {ax - 1.2, 2.2, az}, {0.4, 0.4, 0.6}, {0.9f, 0.1f, 0.1f}, {}};
  pw::world::Primitive siren_away = siren;
  siren_away.center.x() = ax + 1.2;
  pw::belief::Slot slot{"ambulance", {{"absent", {}}, {"toward", {ambulance, siren}}, {"away", {ambulance, siren_away}}}};
  return std::make_shared<const pw::belief::HypothesisSpace>(base, std::vector<pw::belief::Slot>{slot});
}

Outcome belief_equivalence() {
  constexpr int kW = 128, kH = 64;
  const pw::world::Pose origin{{0.0, 1.6, 0.0}, 0.0};
  const pw::world::Pose vantage{{6.0, 1.6, -2.0}, pw::geo::kHalfPi};
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> pos(6.5, 10.0), side(1.5, 4.0), turn(-1.0, 1.0);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int steps = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto space = occluded_space(pos(rng), side(rng));
    const pw::belief::OraclePerception model(space);
    const pw::world::Scene truth = space->realize(static_cast<std::size_t>(trial % 3));
    std::vector<pw::explore::ExplorationConfig> configs = pw::belief::path_to_pose(origin, vantage);
    configs.push_back({turn(rng), 0.8, 2, 0.0});
    const auto scene = std::make_shared<const pw::world::Scene>(truth);
    const pw::explore::ExplorationSession session(pw::explore::make_generator({}, scene),
                                                  pw::world::render_panorama(truth, origin, kW, kH), origin);
    const auto phys = pw::belief::physical_exploration(pw::belief::Belief::uniform(3), truth, origin, configs, model, kW, kH);
    const auto imag = pw::belief::imaginative_update(pw::belief::Belief::uniform(3), session, configs, model);
    if (phys.trace.size() != imag.trace.size()) return {false, fmt("trace length differs in scenario %d", trial)};
    for (std::size_t i = 0; i < phys.trace.size(); ++i) {
      for (std::size_t k = 0; k < 3; ++k) worst = std::max(worst, std::abs(phys.trace[i][k] - imag.trace[i][k]));
      ++steps;
    }
  }
  const double s = seconds_since(t0);
  return {worst <= 1e-12 && s < 120.0,
          fmt("max weight difference %.3g (<= 1e-12) over 50 scenarios, %d steps, %.1f s (< 120 s)", worst, steps, s)};
}

const std::vector<pw::eqa::Scenario>& suite() {
  static const std::vector<pw::eqa::Scenario> s = pw::eqa::builtin_suite();
  return s;
}

Outcome multi_agent() {
  int cases = 0, gold = 0;
  for (const pw::eqa::Scenario& s : suite()) {
    if (s.others.empty()) continue;
    ++cases;
    const pw::belief::OraclePerception model(s.space);
    const pw::world::Scene truth = s.true_scene();
    const Panorama view = pw::world::render_panorama(truth, s.self, s.view_width, s.view_height);
    const pw::explore::ExplorationSession session(
        pw::explore::make_generator({}, std::make_shared<const pw::world::Scene>(truth)), view, s.self);
    const auto prior = pw::belief::Belief::uniform(s.space->size());
    const auto own = pw::belief::physical_update(prior, {view, s.self}, model);
    const auto other = pw::belief::infer_other_agent(prior, session, s.others[0].pose, model);
    const auto& values = s.space->slots()[0].values;
    std::vector<int> hazard;
    for (int v = 0; v < static_cast<int>(values.size()); ++v) {
      if (values[v].label == "toward" || values[v].label == "present") hazard.push_back(v);
    }
    const pw::belief::YieldPolicy policy(*s.space, 0, hazard);
    const auto d = pw::belief::multi_agent_decide({own, other.belief}, {s.context}, policy);
    const std::string& gold_text = s.choices[static_cast<std::size_t>(s.choice_index(s.gold_choice))].text;
    if ((d.action == "yield") == (gold_text != pw::eqa::kProceed)) ++gold;
  }
  return {cases > 0 && gold == cases, fmt("gold action on %d/%d multi-agent scenarios (100%% required)", gold, cases)};
}

Outcome eqa_baselines() {
  using pw::eqa::Mode;
  const auto& s = suite();
  pw::eqa::EvalOptions o;
  o.mode = Mode::Multimodal;
  const double random = pw::eqa::decision_accuracy(pw::eqa::evaluate(s, pw::eqa::RandomAgent(1), o).records);
  const double ci = pw::eqa::binomial_ci95(0.25, s.size());
  const double omni = pw::eqa::decision_accuracy(pw::eqa::evaluate(s, pw::eqa::OmniscientAgent(), o).records);
  std::map<Mode, double> acc;
  for (Mode m : {Mode::Unimodal, Mode::Multimodal, Mode::Imagination}) {
    o.mode = m;
    acc[m] = pw::eqa::decision_accuracy(pw::eqa::evaluate(s, pw::eqa::RuleAgent(), o).records);
  }
  const bool ok = std::abs(random - 0.25) <= ci && omni == 1.0 && acc[Mode::Unimodal] <= acc[Mode::Multimodal] &&
                  acc[Mode::Multimodal] < acc[Mode::Imagination];
  return {ok, fmt("random %.2f%% (25%% +- %.2f%%, n=%zu); omniscient %.2f%%; rule unimodal %.2f%% <= multimodal %.2f%% "
                  "< imagination %.2f%%",
                  100 * random, 100 * ci, s.size(), 100 * omni, 100 * acc[Mode::Unimodal], 100 * acc[Mode::Multimodal],
                  100 * acc[Mode::Imagination])};
}

Outcome metrics_calibration() {
  double worst_psnr = 0.0, worst_ssim = 0.0;
  for (int i = 0; i < 20; ++i) {
    const pw::Image a = pw::testing::planar_pattern(static_cast<std::uint64_t>(i), 48, 32);
    const pw::Image b = pw::testing::add_noise(a, 0.01 + 0.01 * i, 100 + static_cast<std::uint64_t>(i));
    worst_psnr = std::max(worst_psnr, std::abs(pw::metrics::psnr(a, b) - pw::testing::reference_psnr(a, b)));
    worst_ssim = std::max(worst_ssim, std::abs(pw::metrics::ssim(a, b) - pw::testing::reference_ssim(a, b)));
  }
  double seam = 0.0;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> yaw(-pw::geo::kPi, pw::geo::kPi);
  for (int i = 0; i < 100; ++i) {
    const pw::world::Scene scene = pw::world::generate_scene(static_cast<std::uint64_t>(1000 + i));
    const pw::world::Pose pose = pw::world::eye_pose(scene, 0.0, 0.0, yaw(rng));
    seam += pw::metrics::seam_continuity(pw::world::render_panorama(scene, pose, 512, 256));
  }
  seam /= 100.0;
  return {worst_psnr <= 1e-4 && worst_ssim <= 1e-4 && seam > 0.5 && seam < 1.5,
          fmt("PSNR max diff %.3g, SSIM max diff %.3g (<= 1e-4, 20 pairs); mean seam continuity %.3f in (0.5, 1.5) "
              "over 100 renders",
              worst_psnr, worst_ssim, seam)};
}

Outcome point_cloud() {
  pw::world::Scene scene = pw::world::generate_scene(21);
  const pw::world::Pose pose = pw::world::eye_pose(scene, 0.0, 0.0, 0.4);
  const auto points = pw::service::depth_to_points(pw::world::render_panorama(scene, pose, 512, 256),
                                                   pw::world::render_depth(scene, pose, 512, 256), pose);
  double surface = 0.0;
  for (const auto& p : points) {
    // Exact signed distances, independent of the ray caster.
    double best = std::abs(p.position.y() - scene.ground.height);
    for (const auto& prim : scene.primitives) best = std::min(best, std::abs(prim.signed_distance(p.position)));
    surface = std::max(surface, best);
  }
  const Panorama pano = pw::testing::sphere_pattern(0, 256, 128);
  pw::DepthMap depth(256, 128);
  for (double& d : depth.values()) d = 1.0;
  double sphere = 0.0;
  for (const auto& p : pw::service::depth_to_points(pano, depth)) sphere = std::max(sphere, std::abs(p.position.norm() - 1.0));
  return {surface < 1e-3 && sphere < 1e-9 && !points.empty(),
          fmt("%zu points, max surface distance %.3g m (< 1e-3); constant depth sphere error %.3g (< 1e-9)",
              points.size(), surface, sphere)};
}

Outcome replay_and_parity() {
  const auto dir = std::filesystem::temp_directory_path() / "panoworld_acceptance_parity";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto results = pw::testing::run_golden_workflows(dir);
  int ok = 0;
  std::string first;
  for (const auto& r : results) {
    if (r.identical) ++ok;
    else if (first.empty()) first = r.workflow + ": " + r.detail;
  }
  std::filesystem::remove_all(dir);
  const bool pass = results.size() == 3 && ok == 3;
  return {pass, fmt("%d/%zu golden workflows identical (trajectory replay included)%s%s", ok, results.size(),
                    first.empty() ? "" : "; ", first.c_str())};
}

}  // namespace

int main() {
  check("coordinate-round-trip", coordinate_round_trip);
  check("rotation-exactness", rotation_exactness);
  check("cubemap-round-trip", cubemap_round_trip);
  check("oracle-loop-closure", oracle_ielc);
  check("noise-ordering", noise_ordering);
  check("belief-equivalence", belief_equivalence);
  check("multi-agent-inference", multi_agent);
  check("eqa-baselines", eqa_baselines);
  check("metrics-calibration", metrics_calibration);
  check("point-cloud", point_cloud);
  check("replay-parity", replay_and_parity);
  std::printf("%d criteria failed\n", failures);
  return failures;
}
