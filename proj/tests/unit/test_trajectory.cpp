#include "panoworld/common/image_io.hpp"
#include "panoworld/explore/trajectory.hpp"

#include <gtest/gtest.h>

#include <filesystem>

namespace panoworld::explore {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("panoworld_traj_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SessionRecipe recipe(const std::string& kind) {
  SessionRecipe r;
  r.scene = std::make_shared<const world::Scene>(world::generate_scene(77));
  r.generator.kind = kind;
  r.generator.sigma = 0.05;
  r.origin_pose = world::eye_pose(*r.scene, 0, 0, 0.1);
  r.width = 96;
  r.height = 48;
  r.options.seed = 5;
  return r;
}

fs::path record(const fs::path& dir, const SessionRecipe& r) {
  ExplorationSession s = r.build();
  const fs::path file = dir / "run.jsonl";
  TrajectoryLog log(file, r, s);
  for (const ExplorationConfig& c : {ExplorationConfig{0.3, 1.2, 3, 0.0}, ExplorationConfig{-1.1, 0.8, 2, 0.0}}) {
    const auto frames = s.step(c);
    log.append(s, frames);
  }
  return file;
}

TEST(SessionRecipe, JsonRoundTrip) {
  const SessionRecipe r = recipe("noisy-oracle");
  const SessionRecipe back = SessionRecipe::from_json(r.to_json());
  EXPECT_EQ(world::serialize(*back.scene), world::serialize(*r.scene));
  EXPECT_EQ(back.generator.kind, "noisy-oracle");
  EXPECT_EQ(back.width, 96);
  EXPECT_EQ(back.options.seed, 5u);
  EXPECT_EQ(back.build().origin_view(), r.build().origin_view());
}

TEST(Trajectory, ReplayIsBitIdentical) {
  for (const std::string kind : {"oracle", "noisy-oracle"}) {
    const fs::path dir = scratch(kind);
    const fs::path file = record(dir, recipe(kind));
    std::vector<TrajectoryRecord> records;
    read_trajectory(file, records);
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].frame_files.size(), 3u);
    const ReplayReport rep = replay_trajectory(file);
    EXPECT_TRUE(rep.identical()) << kind << ": " << (rep.problems.empty() ? "" : rep.problems.front());
    EXPECT_EQ(rep.steps, 2);
    EXPECT_EQ(rep.frames_checked, 5);
  }
}

TEST(Trajectory, TamperedFrameIsDetected) {
  const fs::path dir = scratch("tamper");
  const fs::path file = record(dir, recipe("oracle"));
  std::vector<TrajectoryRecord> records;
  read_trajectory(file, records);
  const fs::path frame = dir / records[1].frame_files[0];
  Image img = frame.extension() == ".png" ? io::read_png(frame) : io::read_pfm(frame);
  img.at(3, 3) = img.at(3, 3) == Rgb{0, 0, 0} ? Rgb{1, 1, 1} : Rgb{0, 0, 0};
  if (frame.extension() == ".png") {
    io::write_png(frame, img);
  } else {
    io::write_pfm(frame, img);
  }
  const ReplayReport rep = replay_trajectory(file);
  EXPECT_FALSE(rep.identical());
  EXPECT_GE(rep.mismatches + static_cast<int>(rep.problems.size()), 1);
}

}  // namespace
}  // namespace panoworld::explore
