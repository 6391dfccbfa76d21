#pragma once

#include "panoworld/common/image_io.hpp"
#include "panoworld/explore/generator.hpp"

#include <json.hpp>

#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace panoworld::explore {

/// Pipe protocol for out-of-process generators. A message is
///   u32 LE header length | header JSON | repeated (u32 LE length | PNG bytes)
/// The header carries "images" (payload count), "width" and "height".
/// Requests add frame_count, heading_change, distance, climb, step, seed and
/// final_only; responses carry frame_count or an "error" string.
namespace wire {

struct Message {
  nlohmann::json header;
  std::vector<Image> images;
};

inline constexpr const char* kSchema = "panoworld.generator/1";

io::Bytes encode(const Message& message);
/// Throws ErrorKind::Protocol on truncated or malformed input.
Message decode(std::span<const std::uint8_t> bytes);

/// Blocking I/O on file descriptors. read_message throws ErrorKind::Protocol
/// on EOF or malformed data.
void write_message(int fd, const Message& message);
Message read_message(int fd);

Message make_request(const GenerationRequest& request);
Message make_response(const std::vector<Image>& frames);
Message make_error(const std::string& text);

}  // namespace wire

/// Runs `argv` as a child process speaking the wire protocol on its stdin and
/// stdout. The process is started on first use and kept for later requests;
/// calls are serialized.
class ExternalGenerator : public WorldGenerator {
 public:
  explicit ExternalGenerator(std::vector<std::string> argv);
  ~ExternalGenerator() override;
  ExternalGenerator(const ExternalGenerator&) = delete;
  ExternalGenerator& operator=(const ExternalGenerator&) = delete;

  std::vector<Panorama> generate(const GenerationRequest& request) override;
  std::string name() const override { return "external"; }
  nlohmann::json describe() const override;
  bool exclusive() const override { return true; }

 private:
  void start();
  void stop();

  std::vector<std::string> argv_;
  std::mutex mutex_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
};

}  // namespace panoworld::explore
