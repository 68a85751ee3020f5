#ifndef GLEAM_BRIDGE_HPP
#define GLEAM_BRIDGE_HPP

// Line-delimited JSON bridge to externally hosted policies.
//
//   env   -> agent   {"gleam_bridge":1}
//   agent -> env     {"gleam_bridge":1}
//   per step:
//   env   -> agent   {"step":n,"pose":[x,y,theta],"history":[[x,y,theta],...],
//                     "ego":"<RLE>","last":"Moved|CollisionPenalized|Truncated"}
//   agent -> env     {"dx":f,"dy":f,"dtheta":f}
//
// The ego map is 128x128 row-major over the characters O (occupied), F (free),
// U (unknown), X (frontier), run-length encoded as <count><char> pairs.
// The environment closes its write side when the episode ends.

#include <chrono>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gleam/mapping.hpp"
#include "gleam/policy.hpp"

namespace gleam {

enum class BridgeFaultKind { Timeout, Protocol };

class BridgeError : public std::runtime_error {
 public:
  BridgeError(BridgeFaultKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  BridgeFaultKind kind() const { return kind_; }

 private:
  BridgeFaultKind kind_;
};

inline constexpr int kBridgeProtocolVersion = 1;
inline constexpr std::chrono::milliseconds kDefaultBridgeTimeout{5000};

std::string rle_encode(const SemanticGrid& grid);
/// Throws BridgeError(Protocol) on malformed input or a size mismatch.
SemanticGrid rle_decode(std::string_view rle, int width, int height);

std::string handshake_message();
std::string encode_step(const Observation& obs);
/// Parses an agent reply. Throws BridgeError(Protocol) when malformed.
Action decode_action(std::string_view line);

struct DecodedStep {
  int step = 0;
  Pose pose;
  std::vector<Pose> history;
  SemanticGrid ego;
  ActionResult last = ActionResult::Moved;
};
/// Agent-side parse of a step message.
DecodedStep decode_step(std::string_view line);
std::string encode_action(const Action& a);

/// Byte stream carrying newline-delimited messages.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send_line(std::string_view line) = 0;
  /// Next line without its newline; nullopt on timeout. Throws
  /// BridgeError(Protocol) when the peer closed the stream.
  virtual std::optional<std::string> receive_line(std::chrono::milliseconds timeout) = 0;
  /// Signals end of stream to the peer.
  virtual void close_output() = 0;
};

/// Transport over a pair of file descriptors, which it owns.
class FdTransport : public Transport {
 public:
  FdTransport(int read_fd, int write_fd);
  ~FdTransport() override;
  FdTransport(const FdTransport&) = delete;
  FdTransport& operator=(const FdTransport&) = delete;

  void send_line(std::string_view line) override;
  std::optional<std::string> receive_line(std::chrono::milliseconds timeout) override;
  void close_output() override;

 private:
  int read_fd_;
  int write_fd_;
  std::string buffer_;
};

/// Opens an endpoint: `cmd:<shell command>` spawns a child speaking the
/// protocol on stdin/stdout; `unix:<path>` connects to a Unix socket.
std::unique_ptr<Transport> open_endpoint(const std::string& endpoint);

/// Policy hosted on the other side of a transport. Performs the handshake
/// on construction.
class BridgePolicy final : public Policy {
 public:
  BridgePolicy(std::unique_ptr<Transport> transport,
               std::chrono::milliseconds timeout = kDefaultBridgeTimeout,
               double radius = kDefaultActionRadius);
  ~BridgePolicy() override;

  std::string name() const override { return "bridge"; }
  Decision act(const Observation& obs, const PolicyContext& ctx) override;

 private:
  std::string receive(const char* what);

  std::unique_ptr<Transport> transport_;
  std::chrono::milliseconds timeout_;
  double radius_;
};

}  // namespace gleam

#endif  // GLEAM_BRIDGE_HPP
