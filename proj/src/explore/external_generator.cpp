#include "panoworld/explore/external_generator.hpp"

#include "panoworld/common/error.hpp"

#include <csignal>
#include <cstring>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace panoworld::explore {

using nlohmann::json;

namespace wire {

namespace {

void put_u32(io::Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  if (pos + 4 > bytes.size()) throw Error(ErrorKind::Protocol, "generator message truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos + i]) << (8 * i);
  pos += 4;
  return v;
}

void write_all(int fd, const std::uint8_t* data, std::size_t n) {
  while (n > 0) {
    const ssize_t k = ::write(fd, data, n);
    if (k < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorKind::Generator, std::string("pipe write failed: ") + std::strerror(errno));
    }
    data += k;
    n -= static_cast<std::size_t>(k);
  }
}

void read_all(int fd, std::uint8_t* data, std::size_t n) {
  while (n > 0) {
    const ssize_t k = ::read(fd, data, n);
    if (k < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorKind::Generator, std::string("pipe read failed: ") + std::strerror(errno));
    }
    if (k == 0) throw Error(ErrorKind::Protocol, "generator stream ended mid-message");
    data += k;
    n -= static_cast<std::size_t>(k);
  }
}

std::uint32_t read_u32(int fd) {
  std::uint8_t b[4];
  read_all(fd, b, 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

constexpr std::uint32_t kMaxChunk = 1u << 30;

}  // namespace

io::Bytes encode(const Message& message) {
  json header = message.header;
  header["images"] = message.images.size();
  const std::string text = header.dump();
  io::Bytes out;
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const Image& img : message.images) {
    const io::Bytes png = io::encode_png(img);
    put_u32(out, static_cast<std::uint32_t>(png.size()));
    out.insert(out.end(), png.begin(), png.end());
  }
  return out;
}

Message decode(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const std::uint32_t hlen = get_u32(bytes, pos);
  if (pos + hlen > bytes.size()) throw Error(ErrorKind::Protocol, "generator header truncated");
  Message m;
  m.header = json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                         bytes.begin() + static_cast<std::ptrdiff_t>(pos + hlen), nullptr, false);
  if (m.header.is_discarded() || !m.header.is_object()) throw Error(ErrorKind::Protocol, "generator header is not a JSON object");
  pos += hlen;
  const auto count = m.header.value("images", 0);
  for (int i = 0; i < count; ++i) {
    const std::uint32_t n = get_u32(bytes, pos);
    if (pos + n > bytes.size()) throw Error(ErrorKind::Protocol, "generator payload truncated");
    m.images.push_back(io::decode_png(bytes.subspan(pos, n)));
    pos += n;
  }
  if (pos != bytes.size()) throw Error(ErrorKind::Protocol, "trailing bytes after generator message");
  return m;
}

void write_message(int fd, const Message& message) {
  const io::Bytes bytes = encode(message);
  write_all(fd, bytes.data(), bytes.size());
}

Message read_message(int fd) {
  const std::uint32_t hlen = read_u32(fd);
  if (hlen > kMaxChunk) throw Error(ErrorKind::Protocol, "generator header too large");
  std::string text(hlen, '\0');
  read_all(fd, reinterpret_cast<std::uint8_t*>(text.data()), hlen);
  Message m;
  m.header = json::parse(text, nullptr, false);
  if (m.header.is_discarded() || !m.header.is_object()) throw Error(ErrorKind::Protocol, "generator header is not a JSON object");
  const auto count = m.header.value("images", 0);
  for (int i = 0; i < count; ++i) {
    const std::uint32_t n = read_u32(fd);
    if (n > kMaxChunk) throw Error(ErrorKind::Protocol, "generator payload too large");
    io::Bytes png(n);
    read_all(fd, png.data(), n);
    m.images.push_back(io::decode_png(png));
  }
  return m;
}

Message make_request(const GenerationRequest& request) {
  Message m;
  m.header = {{"schema", kSchema},
              {"frame_count", request.config.frame_count},
              {"width", request.view.width()},
              {"height", request.view.height()},
              {"heading_change", request.config.heading_change},
              {"distance", request.config.distance},
              {"climb", request.config.climb},
              {"step", request.step_index},
              {"seed", request.seed},
              {"final_only", request.final_only}};
  m.images.push_back(request.view);
  return m;
}

Message make_response(const std::vector<Image>& frames) {
  Message m;
  m.header = {{"schema", kSchema}, {"frame_count", frames.size()}};
  if (!frames.empty()) {
    m.header["width"] = frames.front().width();
    m.header["height"] = frames.front().height();
  }
  m.images = frames;
  return m;
}

Message make_error(const std::string& text) {
  Message m;
  m.header = {{"schema", kSchema}, {"error", text}};
  return m;
}

}  // namespace wire

ExternalGenerator::ExternalGenerator(std::vector<std::string> argv) : argv_(std::move(argv)) {
  if (argv_.empty()) throw Error(ErrorKind::Domain, "external generator needs a command");
}

ExternalGenerator::~ExternalGenerator() { stop(); }

void ExternalGenerator::start() {
  // A dead child must surface as a Generator error, not SIGPIPE.
  std::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2], out_pipe[2];
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
    throw Error(ErrorKind::Generator, std::string("pipe() failed: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], 0);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], 1);
  posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
  posix_spawn_file_actions_addclose(&actions, out_pipe[0]);
  std::vector<char*> args;
  for (auto& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);
  pid_t pid = -1;
  const int rc = posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw Error(ErrorKind::Generator, "cannot start external generator '" + argv_[0] + "': " + std::strerror(rc));
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

void ExternalGenerator::stop() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
  pid_ = -1;
}

std::vector<Panorama> ExternalGenerator::generate(const GenerationRequest& request) {
  std::lock_guard lock(mutex_);
  if (pid_ < 0) start();
  wire::Message reply;
  try {
    wire::write_message(to_child_, wire::make_request(request));
    reply = wire::read_message(from_child_);
  } catch (const Error& e) {
    stop();
    throw Error(ErrorKind::Generator, std::string("external generator failed: ") + e.what());
  }
  if (reply.header.contains("error")) {
    throw Error(ErrorKind::Generator, "external generator error: " + reply.header["error"].dump());
  }
  const std::size_t expected = request.final_only ? 1u : static_cast<std::size_t>(request.config.frame_count);
  if (reply.images.size() != expected && reply.images.size() != static_cast<std::size_t>(request.config.frame_count)) {
    throw Error(ErrorKind::Generator, "external generator returned " + std::to_string(reply.images.size()) +
                                          " frames, expected " + std::to_string(expected));
  }
  if (request.final_only && reply.images.size() > 1) {
    Panorama last = std::move(reply.images.back());
    reply.images.clear();
    reply.images.push_back(std::move(last));
  }
  return std::move(reply.images);
}

json ExternalGenerator::describe() const {
  GeneratorSpec spec;
  spec.kind = "external";
  spec.command = argv_;
  return spec.to_json();
}

}  // namespace panoworld::explore
