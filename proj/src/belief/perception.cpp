#include "panoworld/belief/perception.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/common/http_json.hpp"
#include "panoworld/common/image_io.hpp"
#include "panoworld/geometry/cubemap.hpp"
#include "panoworld/world/render.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace panoworld::belief {

using nlohmann::json;

OraclePerception::OraclePerception(std::shared_ptr<const HypothesisSpace> space) : space_(std::move(space)) {
  if (!space_) throw Error(ErrorKind::Domain, "perception needs a hypothesis space");
  for (std::size_t h = 0; h < space_->size(); ++h) worlds_.push_back(space_->realize(h));
}

std::vector<Panorama> OraclePerception::predictions(const world::Pose& pose, int width, int height) const {
  std::vector<Panorama> out;
  out.reserve(worlds_.size());
  for (const world::Scene& w : worlds_) {
    try {
      out.push_back(world::render_panorama(w, pose, width, height));
    } catch (const Error& e) {
      // The pose is inside a solid of this world: nothing it predicts can be seen.
      if (e.kind() != ErrorKind::Render) throw;
      out.emplace_back();
    }
  }
  return out;
}

std::vector<double> OraclePerception::likelihoods(const Observation& obs) const {
  const auto predicted = predictions(obs.pose, obs.view.width(), obs.view.height());
  std::vector<double> l(predicted.size());
  for (std::size_t h = 0; h < predicted.size(); ++h) l[h] = predicted[h] == obs.view ? 1.0 : 0.0;
  return l;
}

ProbabilisticPerception::ProbabilisticPerception(std::shared_ptr<const HypothesisSpace> space, double tolerance,
                                                 double floor)
    : oracle_(std::move(space)), tolerance_(tolerance), floor_(floor) {
  if (!(tolerance >= 0.0) || !(floor >= 0.0 && floor <= 1.0)) {
    throw Error(ErrorKind::Domain, "perception tolerance must be >= 0 and floor in [0, 1]");
  }
}

std::vector<double> ProbabilisticPerception::likelihoods(const Observation& obs) const {
  const auto predicted = oracle_.predictions(obs.pose, obs.view.width(), obs.view.height());
  const std::size_t n = predicted.size();
  std::vector<std::size_t> live;
  for (std::size_t h = 0; h < n; ++h) {
    if (!predicted[h].empty()) live.push_back(h);
  }
  std::vector<double> l(n, 0.0);
  if (live.empty()) return l;
  std::vector<std::size_t> agree(n, 0);
  std::size_t region = 0;
  const auto close = [&](const Rgb& a, const Rgb& b) {
    return std::abs(a.r - b.r) <= tolerance_ && std::abs(a.g - b.g) <= tolerance_ && std::abs(a.b - b.b) <= tolerance_;
  };
  const std::size_t pixels = obs.view.size();
  for (std::size_t i = 0; i < pixels; ++i) {
    const Rgb& first = predicted[live[0]].pixels()[i];
    bool differs = false;
    for (std::size_t k = 1; k < live.size() && !differs; ++k) differs = !(predicted[live[k]].pixels()[i] == first);
    if (!differs) continue;
    ++region;
    const Rgb& seen = obs.view.pixels()[i];
    for (std::size_t h : live) {
      if (close(seen, predicted[h].pixels()[i])) ++agree[h];
    }
  }
  for (std::size_t h : live) {
    const double a = region == 0 ? 1.0 : static_cast<double>(agree[h]) / static_cast<double>(region);
    l[h] = floor_ + (1.0 - floor_) * a;
  }
  return l;
}

HttpPerception::HttpPerception(std::shared_ptr<const HypothesisSpace> space, std::string url, int face_size)
    : space_(std::move(space)), url_(std::move(url)), face_size_(face_size) {}

std::vector<double> HttpPerception::from_judgments(const HypothesisSpace& space, const json& reply) {
  if (!reply.contains("judgments") || !reply["judgments"].is_array()) {
    throw Error(ErrorKind::Protocol, "perception reply lacks judgments", reply.dump());
  }
  std::vector<double> l(space.size(), 1.0);
  for (const json& j : reply["judgments"]) {
    const std::string slot = j.value("slot", std::string());
    const std::string value = j.value("value", std::string());
    const double c = j.value("confidence", -1.0);
    if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorKind::Protocol, "judgment confidence outside [0, 1]", j.dump());
    std::optional<std::size_t> s;
    for (std::size_t k = 0; k < space.slots().size(); ++k) {
      if (space.slots()[k].name == slot) s = k;
    }
    if (!s) throw Error(ErrorKind::Protocol, "judgment names unknown slot " + slot, j.dump());
    const auto& values = space.slots()[*s].values;
    const auto it = std::find_if(values.begin(), values.end(), [&](const SlotValue& v) { return v.label == value; });
    if (it == values.end()) throw Error(ErrorKind::Protocol, "judgment names unknown value " + value, j.dump());
    const int v = static_cast<int>(it - values.begin());
    const double other = values.size() > 1 ? (1.0 - c) / static_cast<double>(values.size() - 1) : 1.0;
    for (std::size_t h = 0; h < space.size(); ++h) l[h] *= space.value_of(h, *s) == v ? c : other;
  }
  return l;
}

std::vector<double> HttpPerception::likelihoods(const Observation& obs) const {
  json slots = json::array();
  for (const Slot& s : space_->slots()) {
    json labels = json::array();
    for (const SlotValue& v : s.values) labels.push_back(v.label);
    slots.push_back({{"name", s.name}, {"values", labels}});
  }
  const geo::CubeMap cube = geo::panorama_to_cubemap(obs.view, face_size_);
  json faces = json::object();
  for (geo::Face f : geo::kAllFaces) {
    faces[std::string(geo::face_name(f))] = io::base64_encode(io::encode_png(cube.face(f)));
  }
  const json reply = net::post_json(url_, {{"slots", slots}, {"faces", faces}, {"pose", world::to_json(obs.pose)}});
  return from_judgments(*space_, reply);
}

}  // namespace panoworld::belief
