#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ecolens/accuracy.hpp"
#include "ecolens/loop.hpp"

namespace ecolens::protocol {

// Framing: 4-byte big-endian unsigned payload length, then that many bytes
// of UTF-8 JSON: {"type": "<kind>", ...}. Binary frame payloads travel
// base64-encoded inside the body.

struct Hello {
    std::string agent;  // "camera" or "server"
    friend bool operator==(const Hello&, const Hello&) = default;
};

struct ConfigUpdate {
    double threshold = 0.0;       // [0, 0.10]
    int bitrate_kbps = 3000;      // [100, 3000]
    double exploit_s = 60.0;      // how long the camera exploits before the next burst
    int round = 0;
    friend bool operator==(const ConfigUpdate&, const ConfigUpdate&) = default;
};

struct GtBurstBegin {
    int round = 0;
    double t_s = 0.0;
    int frame_count = 0;
    int bitrate_kbps = 3000;
    friend bool operator==(const GtBurstBegin&, const GtBurstBegin&) = default;
};

/// Exactly one of data_b64 (raw P5 bytes) or ref (detection reference) is set.
struct FrameMsg {
    int frame_index = 0;
    std::optional<std::string> data_b64;
    std::optional<std::string> ref;
    friend bool operator==(const FrameMsg&, const FrameMsg&) = default;
};

struct GtBurstEnd {
    int round = 0;
    friend bool operator==(const GtBurstEnd&, const GtBurstEnd&) = default;
};

struct Detections {
    int frame = 0;
    std::vector<BoundingBox> boxes;
    friend bool operator==(const Detections&, const Detections&) = default;
};

struct SummaryMsg {
    nlohmann::json body;
    friend bool operator==(const SummaryMsg&, const SummaryMsg&) = default;
};

struct Bye {
    friend bool operator==(const Bye&, const Bye&) = default;
};

using Message = std::variant<Hello, ConfigUpdate, GtBurstBegin, FrameMsg, GtBurstEnd, Detections,
                             SummaryMsg, Bye>;

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode(const Message& msg);

struct DecodeResult {
    std::optional<Message> message;  // empty: need more bytes
    std::size_t consumed = 0;        // bytes consumed from the input
};

/// Parses one complete frame if available; signals need-more-bytes (empty
/// message, zero consumed) on short input. Malformed bodies or unknown types
/// throw ProtocolError carrying the offending prefix.
DecodeResult decode(const std::uint8_t* data, std::size_t size);

/// Incremental decoder over a byte stream.
class MessageReader {
public:
    void feed(const std::uint8_t* data, std::size_t size);
    std::optional<Message> next();

private:
    std::vector<std::uint8_t> buffer_;
};

std::string base64_encode(const std::uint8_t* data, std::size_t size);
std::vector<std::uint8_t> base64_decode(const std::string& text);

struct CameraOptions {
    std::string host = "127.0.0.1";
    int port = 0;
    std::filesystem::path frames_dir;  // empty: procedural synthetic frames
    double threshold = 0.0;
    int bitrate_kbps = 3000;
    std::uint64_t seed = 7;
};

struct ServerOptions {
    int port = 0;  // 0 binds an ephemeral port
    LoopParams params;
    SceneModel scene;
    Configuration baseline{2.4, FilterFeature::Pixel, 0.0, 3000};
    std::filesystem::path trace_path;    // flushed per event
    std::filesystem::path summary_path;  // written at end of run
};

/// Accepts one camera, drives the online loop over the wire and writes the
/// trace/summary files. Returns process-style status (0 on clean Bye).
/// `bound_port`, when given, receives the listening port before accept.
int run_server_agent(const ServerOptions& options, int* bound_port = nullptr);

/// Connects to a server, streams ground-truth bursts and filtered exploit
/// frames, and applies config updates at phase boundaries. Returns 0 on Bye.
int run_camera_agent(const CameraOptions& options);

}  // namespace ecolens::protocol
