#include "panoworld/belief/hypothesis.hpp"

#include "panoworld/common/error.hpp"

#include <algorithm>
#include <cmath>

namespace panoworld::belief {

using nlohmann::json;

HypothesisSpace::HypothesisSpace(world::Scene base, std::vector<Slot> slots)
    : base_(std::move(base)), slots_(std::move(slots)) {
  for (const Slot& s : slots_) {
    if (s.values.empty()) throw Error(ErrorKind::Domain, "slot '" + s.name + "' has no values");
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      for (std::size_t j = i + 1; j < s.values.size(); ++j) {
        if (s.values[i].label == s.values[j].label) {
          throw Error(ErrorKind::Domain, "slot '" + s.name + "' repeats value '" + s.values[i].label + "'");
        }
      }
    }
    strides_.push_back(size_);
    size_ *= s.values.size();
  }
}

int HypothesisSpace::value_of(std::size_t h, std::size_t slot) const {
  return static_cast<int>((h / strides_.at(slot)) % slots_[slot].values.size());
}

std::size_t HypothesisSpace::index_of(const std::vector<int>& assignment) const {
  if (assignment.size() != slots_.size()) throw Error(ErrorKind::Domain, "assignment has the wrong slot count");
  std::size_t h = 0;
  for (std::size_t j = 0; j < slots_.size(); ++j) {
    if (assignment[j] < 0 || static_cast<std::size_t>(assignment[j]) >= slots_[j].values.size()) {
      throw Error(ErrorKind::Domain, "value index out of range for slot '" + slots_[j].name + "'");
    }
    h += strides_[j] * static_cast<std::size_t>(assignment[j]);
  }
  return h;
}

std::size_t HypothesisSpace::find(const std::vector<std::pair<std::string, std::string>>& labels) const {
  std::vector<int> assignment(slots_.size(), -1);
  for (const auto& [slot, value] : labels) {
    bool found = false;
    for (std::size_t j = 0; j < slots_.size() && !found; ++j) {
      if (slots_[j].name != slot) continue;
      for (std::size_t v = 0; v < slots_[j].values.size(); ++v) {
        if (slots_[j].values[v].label == value) {
          assignment[j] = static_cast<int>(v);
          found = true;
          break;
        }
      }
    }
    if (!found) throw Error(ErrorKind::Domain, "no slot value " + slot + "=" + value);
  }
  for (std::size_t j = 0; j < slots_.size(); ++j) {
    if (assignment[j] < 0) throw Error(ErrorKind::Domain, "slot '" + slots_[j].name + "' left unassigned");
  }
  return index_of(assignment);
}

std::string HypothesisSpace::id(std::size_t h) const {
  std::string out;
  for (std::size_t j = 0; j < slots_.size(); ++j) {
    if (j > 0) out += ',';
    out += slots_[j].name + "=" + slots_[j].values[static_cast<std::size_t>(value_of(h, j))].label;
  }
  return out;
}

world::Scene HypothesisSpace::realize(std::size_t h) const {
  if (h >= size_) throw Error(ErrorKind::Domain, "hypothesis index out of range");
  world::Scene scene = base_;
  for (std::size_t j = 0; j < slots_.size(); ++j) {
    const SlotValue& v = slots_[j].values[static_cast<std::size_t>(value_of(h, j))];
    scene.primitives.insert(scene.primitives.end(), v.primitives.begin(), v.primitives.end());
  }
  return scene;
}

json HypothesisSpace::to_json() const {
  json slots = json::array();
  for (const Slot& s : slots_) {
    json values = json::array();
    for (const SlotValue& v : s.values) {
      json prims = json::array();
      for (const world::Primitive& p : v.primitives) prims.push_back(world::to_json(p));
      values.push_back({{"label", v.label}, {"primitives", prims}});
    }
    slots.push_back({{"name", s.name}, {"values", values}});
  }
  return {{"base", world::to_json(base_)}, {"slots", slots}};
}

HypothesisSpace HypothesisSpace::from_json(const json& doc) {
  try {
    std::vector<Slot> slots;
    for (const json& js : doc.at("slots")) {
      Slot s;
      s.name = js.at("name").get<std::string>();
      for (const json& jv : js.at("values")) {
        SlotValue v;
        v.label = jv.at("label").get<std::string>();
        for (const json& jp : jv.value("primitives", json::array())) v.primitives.push_back(world::primitive_from_json(jp));
        s.values.push_back(std::move(v));
      }
      slots.push_back(std::move(s));
    }
    return HypothesisSpace(world::scene_from_json(doc.at("base")), std::move(slots));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Protocol, std::string("malformed hypothesis space: ") + e.what());
  }
}

Belief Belief::uniform(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::Domain, "empty hypothesis space");
  Belief b;
  b.w_.assign(n, 1.0 / static_cast<double>(n));
  return b;
}

Belief Belief::point(std::size_t n, std::size_t index) {
  if (index >= n) throw Error(ErrorKind::Domain, "point mass index out of range");
  Belief b;
  b.w_.assign(n, 0.0);
  b.w_[index] = 1.0;
  return b;
}

Belief Belief::from_weights(std::vector<double> weights) {
  if (weights.empty()) throw Error(ErrorKind::Domain, "empty hypothesis space");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw Error(ErrorKind::Domain, "belief weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::Contradiction, "belief has zero total mass");
  for (double& w : weights) w /= total;
  Belief b;
  b.w_ = std::move(weights);
  return b;
}

Belief Belief::from_normalized(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw Error(ErrorKind::Domain, "belief weights must be finite and >= 0");
    total += w;
  }
  if (weights.empty() || std::abs(total - 1.0) > kNormalizationTolerance) {
    throw Error(ErrorKind::Domain, "belief weights do not sum to 1");
  }
  Belief b;
  b.w_ = std::move(weights);
  return b;
}

double Belief::entropy() const {
  double h = 0.0;
  for (double w : w_) {
    if (w > 0.0) h -= w * std::log(w);
  }
  return h;
}

std::size_t Belief::argmax() const {
  return static_cast<std::size_t>(std::max_element(w_.begin(), w_.end()) - w_.begin());
}

double Belief::marginal(const HypothesisSpace& space, std::size_t slot, int value) const {
  if (space.size() != w_.size()) throw Error(ErrorKind::DimensionMismatch, "belief does not match the space");
  double m = 0.0;
  for (std::size_t h = 0; h < w_.size(); ++h) {
    if (space.value_of(h, slot) == value) m += w_[h];
  }
  return m;
}

json dump(const HypothesisSpace& space, const Belief& belief) {
  if (space.size() != belief.size()) throw Error(ErrorKind::DimensionMismatch, "belief does not match the space");
  json hyps = json::array();
  for (std::size_t h = 0; h < belief.size(); ++h) hyps.push_back({{"id", space.id(h)}, {"weight", belief[h]}});
  return {{"schema", kBeliefSchema}, {"hypotheses", hyps}};
}

Belief belief_from_dump(const HypothesisSpace& space, const json& doc) {
  if (doc.value("schema", std::string()) != kBeliefSchema) throw Error(ErrorKind::Protocol, "not a belief dump");
  std::vector<double> w(space.size(), 0.0);
  std::vector<bool> seen(space.size(), false);
  for (const json& e : doc.at("hypotheses")) {
    const std::string id = e.at("id").get<std::string>();
    std::size_t h = 0;
    while (h < space.size() && space.id(h) != id) ++h;
    if (h == space.size()) throw Error(ErrorKind::Protocol, "unknown hypothesis id " + id);
    w[h] = e.at("weight").get<double>();
    seen[h] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error(ErrorKind::Protocol, "belief dump does not cover the space");
  }
  return Belief::from_normalized(std::move(w));
}

}  // namespace panoworld::belief
