#include "gleam/bridge.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "json.hpp"

namespace gleam {

namespace {

using ordered_json = nlohmann::ordered_json;

char state_char(CellState s) {
  switch (s) {
    case CellState::Occupied:
      return 'O';
    case CellState::Free:
      return 'F';
    case CellState::Frontier:
      return 'X';
    case CellState::Unknown:
      break;
  }
  return 'U';
}

std::optional<CellState> char_state(char c) {
  switch (c) {
    case 'O':
      return CellState::Occupied;
    case 'F':
      return CellState::Free;
    case 'X':
      return CellState::Frontier;
    case 'U':
      return CellState::Unknown;
    default:
      return std::nullopt;
  }
}

[[noreturn]] void protocol_error(const std::string& what) {
  throw BridgeError(BridgeFaultKind::Protocol, "bridge protocol: " + what);
}

ordered_json pose_json(const Pose& p) { return ordered_json::array({p.x, p.y, p.theta}); }

Pose json_pose(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
      !j[2].is_number()) {
    protocol_error("pose must be [x,y,theta]");
  }
  return Pose{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string rle_encode(const SemanticGrid& grid) {
  std::string out;
  const auto& d = grid.data();
  std::size_t i = 0;
  while (i < d.size()) {
    std::size_t j = i + 1;
    while (j < d.size() && d[j] == d[i]) {
      ++j;
    }
    out += std::to_string(j - i);
    out.push_back(state_char(d[i]));
    i = j;
  }
  return out;
}

SemanticGrid rle_decode(std::string_view rle, int width, int height) {
  SemanticGrid grid(width, height, CellState::Unknown);
  std::size_t pos = 0;
  std::size_t filled = 0;
  std::size_t i = 0;
  while (i < rle.size()) {
    std::size_t count = 0;
    const std::size_t start = i;
    while (i < rle.size() && rle[i] >= '0' && rle[i] <= '9') {
      count = count * 10 + static_cast<std::size_t>(rle[i] - '0');
      if (count > grid.size()) {
        protocol_error("RLE run exceeds grid size");
      }
      ++i;
    }
    if (i == start || i >= rle.size() || count == 0) {
      protocol_error("malformed RLE pair");
    }
    const auto s = char_state(rle[i++]);
    if (!s) {
      protocol_error("invalid RLE cell character");
    }
    if (filled + count > grid.size()) {
      protocol_error("RLE longer than grid");
    }
    for (std::size_t k = 0; k < count; ++k) {
      grid.data()[pos++] = *s;
    }
    filled += count;
  }
  if (filled != grid.size()) {
    protocol_error("RLE shorter than grid");
  }
  return grid;
}

std::string handshake_message() {
  ordered_json j;
  j["gleam_bridge"] = kBridgeProtocolVersion;
  return j.dump();
}

std::string encode_step(const Observation& obs) {
  ordered_json j;
  j["step"] = obs.step_index;
  j["pose"] = pose_json(obs.pose());
  ordered_json hist = ordered_json::array();
  for (const auto& p : obs.pose_history) {
    hist.push_back(pose_json(p));
  }
  j["history"] = std::move(hist);
  j["ego"] = rle_encode(obs.ego.cells);
  j["last"] = std::string(to_string(obs.last));
  return j.dump();
}

Action decode_action(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    protocol_error(std::string("unparseable action: ") + e.what());
  }
  if (!j.is_object() || j.size() != 3) {
    protocol_error("action must be an object with exactly dx, dy, dtheta");
  }
  Action a;
  for (const auto& [key, field] : {std::pair{"dx", &a.dx}, std::pair{"dy", &a.dy},
                                   std::pair{"dtheta", &a.dtheta}}) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number()) {
      protocol_error(std::string("action field '") + key + "' missing or not a number");
    }
    *field = it->get<double>();
  }
  return a;
}

std::string encode_action(const Action& a) {
  ordered_json j;
  j["dx"] = a.dx;
  j["dy"] = a.dy;
  j["dtheta"] = a.dtheta;
  return j.dump();
}

DecodedStep decode_step(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    protocol_error(std::string("unparseable step: ") + e.what());
  }
  if (!j.is_object() || !j.contains("step") || !j.contains("pose") || !j.contains("history") ||
      !j.contains("ego") || !j.contains("last")) {
    protocol_error("step message missing fields");
  }
  DecodedStep s;
  if (!j["step"].is_number_integer()) {
    protocol_error("step must be an integer");
  }
  s.step = j["step"].get<int>();
  s.pose = json_pose(j["pose"]);
  if (!j["history"].is_array()) {
    protocol_error("history must be an array");
  }
  for (const auto& p : j["history"]) {
    s.history.push_back(json_pose(p));
  }
  if (!j["ego"].is_string() || !j["last"].is_string()) {
    protocol_error("ego and last must be strings");
  }
  s.ego = rle_decode(j["ego"].get<std::string>(), EgoSemanticMap::kSize, EgoSemanticMap::kSize);
  const auto last = parse_action_result(j["last"].get<std::string>());
  if (!last) {
    protocol_error("unknown last-action result");
  }
  s.last = *last;
  return s;
}

// ---------------------------------------------------------------- transports

FdTransport::FdTransport(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

FdTransport::~FdTransport() {
  close_output();
  if (read_fd_ >= 0 && read_fd_ != write_fd_) {
    ::close(read_fd_);
  }
  read_fd_ = -1;
}

void FdTransport::close_output() {
  if (write_fd_ < 0) {
    return;
  }
  if (write_fd_ == read_fd_) {
    ::shutdown(write_fd_, SHUT_WR);
  } else {
    ::close(write_fd_);
  }
  write_fd_ = -1;
}

void FdTransport::send_line(std::string_view line) {
  if (write_fd_ < 0) {
    protocol_error("write side closed");
  }
  std::string msg(line);
  msg.push_back('\n');
  std::size_t off = 0;
  while (off < msg.size()) {
    const ssize_t n = ::write(write_fd_, msg.data() + off, msg.size() - off);
    if (n < 0) {
      if (errno == EINTR) {
        continue;
      }
      protocol_error(std::string("write failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> FdTransport::receive_line(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      return std::nullopt;
    }
    pollfd pfd{read_fd_, POLLIN, 0};
    const int r = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (r < 0) {
      if (errno == EINTR) {
        continue;
      }
      protocol_error(std::string("poll failed: ") + std::strerror(errno));
    }
    if (r == 0) {
      return std::nullopt;
    }
    char buf[65536];
    const ssize_t n = ::read(read_fd_, buf, sizeof(buf));
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) {
        continue;
      }
      protocol_error(std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) {
      protocol_error("peer closed the stream");
    }
    buffer_.append(buf, static_cast<std::size_t>(n));
  }
}

namespace {

class ProcessTransport final : public FdTransport {
 public:
  ProcessTransport(int read_fd, int write_fd, pid_t pid) : FdTransport(read_fd, write_fd), pid_(pid) {}
  ~ProcessTransport() override {
    close_output();
    int status = 0;
    for (int i = 0; i < 100; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) != 0) {
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
  }

 private:
  pid_t pid_;
};

std::unique_ptr<Transport> spawn_process(const std::string& command) {
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0) {
    protocol_error("pipe failed");
  }
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    protocol_error("pipe failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    protocol_error("fork failed");
  }
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  return std::make_unique<ProcessTransport>(from_child[0], to_child[1], pid);
}

std::unique_ptr<Transport> connect_unix(const std::string& path) {
  const int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) {
    protocol_error("socket failed");
  }
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof(addr.sun_path)) {
    ::close(fd);
    protocol_error("socket path too long");
  }
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    protocol_error("cannot connect to " + path);
  }
  return std::make_unique<FdTransport>(fd, fd);
}

}  // namespace

std::unique_ptr<Transport> open_endpoint(const std::string& endpoint) {
  // a vanished peer must surface as EPIPE, not kill the process
  ::signal(SIGPIPE, SIG_IGN);
  if (endpoint.rfind("cmd:", 0) == 0) {
    return spawn_process(endpoint.substr(4));
  }
  if (endpoint.rfind("unix:", 0) == 0) {
    return connect_unix(endpoint.substr(5));
  }
  protocol_error("unknown endpoint '" + endpoint + "' (expected cmd:<command> or unix:<path>)");
}

// ---------------------------------------------------------------- policy

BridgePolicy::BridgePolicy(std::unique_ptr<Transport> transport, std::chrono::milliseconds timeout,
                           double radius)
    : transport_(std::move(transport)), timeout_(timeout), radius_(radius) {
  transport_->send_line(handshake_message());
  const std::string reply = receive("handshake");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(reply);
  } catch (const nlohmann::json::exception&) {
    protocol_error("unparseable handshake");
  }
  if (!j.is_object() || j.size() != 1 || !j.contains("gleam_bridge") ||
      j["gleam_bridge"] != kBridgeProtocolVersion) {
    protocol_error("handshake mismatch: " + reply);
  }
}

BridgePolicy::~BridgePolicy() {
  if (transport_) {
    transport_->close_output();
  }
}

std::string BridgePolicy::receive(const char* what) {
  auto line = transport_->receive_line(timeout_);
  if (!line) {
    throw BridgeError(BridgeFaultKind::Timeout, std::string("bridge timeout waiting for ") + what);
  }
  return std::move(*line);
}

Decision BridgePolicy::act(const Observation& obs, const PolicyContext&) {
  transport_->send_line(encode_step(obs));
  const Action raw = decode_action(receive("action"));
  Decision d;
  d.action = clamp_action(raw, radius_, &d.clamped);
  return d;
}

}  // namespace gleam
