#pragma once

#include "panoworld/belief/hypothesis.hpp"
#include "panoworld/common/image.hpp"

#include <memory>
#include <string>
#include <vector>

namespace panoworld::belief {

/// A view together with the pose it was (really or imaginatively) taken at.
struct Observation {
  Panorama view;
  world::Pose pose;
};

/// O(o | s): one likelihood in [0, 1] per hypothesis of the bound space.
class ObservationModel {
 public:
  virtual ~ObservationModel() = default;
  virtual std::vector<double> likelihoods(const Observation& observation) const = 0;
  virtual const HypothesisSpace& space() const = 0;
  virtual std::string name() const = 0;
};

/// Exact semantic oracle: a hypothesis is consistent with an observation iff
/// its realized world renders to exactly the observed view from the
/// observation pose. Likelihoods are 0 or 1.
class OraclePerception : public ObservationModel {
 public:
  explicit OraclePerception(std::shared_ptr<const HypothesisSpace> space);
  std::vector<double> likelihoods(const Observation& observation) const override;
  const HypothesisSpace& space() const override { return *space_; }
  std::string name() const override { return "oracle"; }

  /// Render of every hypothesis world at `pose`.
  std::vector<Panorama> predictions(const world::Pose& pose, int width, int height) const;

 private:
  std::shared_ptr<const HypothesisSpace> space_;
  std::vector<world::Scene> worlds_;
};

/// Soft perception for imperfect views. On the pixels where hypothesis
/// predictions disagree, the likelihood of h is floor + (1 - floor) times the
/// fraction of those pixels whose channels all lie within `tolerance` of h's
/// prediction. Pixels all hypotheses agree on carry no evidence.
class ProbabilisticPerception : public ObservationModel {
 public:
  ProbabilisticPerception(std::shared_ptr<const HypothesisSpace> space, double tolerance = 0.02, double floor = 0.05);
  std::vector<double> likelihoods(const Observation& observation) const override;
  const HypothesisSpace& space() const override { return oracle_.space(); }
  std::string name() const override { return "probabilistic"; }

 private:
  OraclePerception oracle_;
  double tolerance_;
  double floor_;
};

/// External perception client. POSTs {"slots": [{"name", "values"}],
/// "faces": {face: base64 PNG}, "pose"} and expects
/// {"judgments": [{"slot", "value", "confidence"}]}. A judgment with
/// confidence c gives c to matching values and (1 - c) / (n - 1) to others;
/// unjudged slots are uninformative.
class HttpPerception : public ObservationModel {
 public:
  HttpPerception(std::shared_ptr<const HypothesisSpace> space, std::string url, int face_size = 128);
  std::vector<double> likelihoods(const Observation& observation) const override;
  const HypothesisSpace& space() const override { return *space_; }
  std::string name() const override { return "http"; }

  /// Turns a judgment reply into per-hypothesis likelihoods.
  static std::vector<double> from_judgments(const HypothesisSpace& space, const nlohmann::json& reply);

 private:
  std::shared_ptr<const HypothesisSpace> space_;
  std::string url_;
  int face_size_;
};

}  // namespace panoworld::belief
