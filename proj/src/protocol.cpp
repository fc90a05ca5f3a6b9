#include "ecolens/protocol.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <fstream>

#include "ecolens/filters.hpp"

namespace ecolens::protocol {

namespace {

constexpr char kB64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

nlohmann::json to_json(const Message& msg) {
    nlohmann::json j;
    std::visit(
        [&j](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Hello>) {
                j["type"] = "hello";
                j["agent"] = m.agent;
            } else if constexpr (std::is_same_v<T, ConfigUpdate>) {
                j["type"] = "config_update";
                j["threshold"] = m.threshold;
                j["bitrate_kbps"] = m.bitrate_kbps;
                j["exploit_s"] = m.exploit_s;
                j["round"] = m.round;
            } else if constexpr (std::is_same_v<T, GtBurstBegin>) {
                j["type"] = "gt_burst_begin";
                j["round"] = m.round;
                j["t_s"] = m.t_s;
                j["frame_count"] = m.frame_count;
                j["bitrate_kbps"] = m.bitrate_kbps;
            } else if constexpr (std::is_same_v<T, FrameMsg>) {
                j["type"] = "frame";
                j["frame_index"] = m.frame_index;
                if (m.data_b64) j["data_b64"] = *m.data_b64;
                if (m.ref) j["ref"] = *m.ref;
            } else if constexpr (std::is_same_v<T, GtBurstEnd>) {
                j["type"] = "gt_burst_end";
                j["round"] = m.round;
            } else if constexpr (std::is_same_v<T, Detections>) {
                j["type"] = "detections";
                j["frame"] = m.frame;
                auto arr = nlohmann::json::array();
                for (const auto& b : m.boxes) arr.push_back({b.x1, b.y1, b.x2, b.y2});
                j["boxes"] = arr;
            } else if constexpr (std::is_same_v<T, SummaryMsg>) {
                j["type"] = "summary";
                j["summary"] = m.body;
            } else if constexpr (std::is_same_v<T, Bye>) {
                j["type"] = "bye";
            }
        },
        msg);
    return j;
}

Message from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "hello") return Hello{j.at("agent").get<std::string>()};
    if (type == "config_update") {
        ConfigUpdate m;
        m.threshold = j.at("threshold").get<double>();
        m.bitrate_kbps = j.at("bitrate_kbps").get<int>();
        m.exploit_s = j.at("exploit_s").get<double>();
        m.round = j.at("round").get<int>();
        if (m.threshold < 0.0 || m.threshold > 0.10)
            throw ProtocolError("config_update threshold outside [0, 0.10]");
        if (m.bitrate_kbps < 100 || m.bitrate_kbps > 3000)
            throw ProtocolError("config_update bitrate outside [100, 3000]");
        return m;
    }
    if (type == "gt_burst_begin") {
        return GtBurstBegin{j.at("round").get<int>(), j.at("t_s").get<double>(),
                            j.at("frame_count").get<int>(), j.at("bitrate_kbps").get<int>()};
    }
    if (type == "frame") {
        FrameMsg m;
        m.frame_index = j.at("frame_index").get<int>();
        if (j.contains("data_b64")) m.data_b64 = j.at("data_b64").get<std::string>();
        if (j.contains("ref")) m.ref = j.at("ref").get<std::string>();
        if (!m.data_b64 && !m.ref)
            throw ProtocolError("frame carries neither raw data nor a detection reference");
        return m;
    }
    if (type == "gt_burst_end") return GtBurstEnd{j.at("round").get<int>()};
    if (type == "detections") {
        Detections m;
        m.frame = j.at("frame").get<int>();
        for (const auto& b : j.at("boxes")) {
            if (!b.is_array() || b.size() != 4) throw ProtocolError("detections box must be 4-tuple");
            m.boxes.push_back({b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                               b[3].get<double>()});
        }
        return m;
    }
    if (type == "summary") return SummaryMsg{j.at("summary")};
    if (type == "bye") return Bye{};
    throw ProtocolError("unknown message type: " + type);
}

std::string offending_prefix(const std::uint8_t* data, std::size_t size) {
    const std::size_t n = std::min<std::size_t>(size, 48);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        const char c = static_cast<char>(data[i]);
        out += (c >= 32 && c < 127) ? c : '.';
    }
    return out;
}

}  // namespace

std::string base64_encode(const std::uint8_t* data, std::size_t size) {
    std::string out;
    out.reserve((size + 2) / 3 * 4);
    for (std::size_t i = 0; i < size; i += 3) {
        std::uint32_t chunk = data[i] << 16;
        if (i + 1 < size) chunk |= data[i + 1] << 8;
        if (i + 2 < size) chunk |= data[i + 2];
        out += kB64Alphabet[(chunk >> 18) & 63];
        out += kB64Alphabet[(chunk >> 12) & 63];
        out += i + 1 < size ? kB64Alphabet[(chunk >> 6) & 63] : '=';
        out += i + 2 < size ? kB64Alphabet[chunk & 63] : '=';
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    auto value_of = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    if (text.size() % 4 != 0) throw ProtocolError("base64 payload length not a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        std::uint32_t chunk = 0;
        int padding = 0;
        for (int k = 0; k < 4; ++k) {
            const char c = text[i + k];
            if (c == '=') {
                ++padding;
                chunk <<= 6;
                continue;
            }
            const int v = value_of(c);
            if (v < 0 || padding > 0) throw ProtocolError("invalid base64 payload");
            chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
        }
        out.push_back(static_cast<std::uint8_t>((chunk >> 16) & 0xff));
        if (padding < 2) out.push_back(static_cast<std::uint8_t>((chunk >> 8) & 0xff));
        if (padding < 1) out.push_back(static_cast<std::uint8_t>(chunk & 0xff));
    }
    return out;
}

std::vector<std::uint8_t> encode(const Message& msg) {
    const std::string body = to_json(msg).dump();
    if (body.size() > 0xffffffffull) throw ProtocolError("message body exceeds 2^32-1 bytes");
    std::vector<std::uint8_t> out;
    out.reserve(4 + body.size());
    const std::uint32_t n = static_cast<std::uint32_t>(body.size());
    out.push_back(static_cast<std::uint8_t>((n >> 24) & 0xff));
    out.push_back(static_cast<std::uint8_t>((n >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((n >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>(n & 0xff));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

DecodeResult decode(const std::uint8_t* data, std::size_t size) {
    if (size < 4) return {};
    const std::uint32_t n = (std::uint32_t(data[0]) << 24) | (std::uint32_t(data[1]) << 16) |
                            (std::uint32_t(data[2]) << 8) | std::uint32_t(data[3]);
    if (size < 4 + static_cast<std::size_t>(n)) return {};
    nlohmann::json j = nlohmann::json::parse(data + 4, data + 4 + n, nullptr, false);
    if (j.is_discarded())
        throw ProtocolError("malformed message body: " + offending_prefix(data + 4, n));
    try {
        return {from_json(j), 4 + static_cast<std::size_t>(n)};
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string(e.what()) + ": " + offending_prefix(data + 4, n));
    }
}

void MessageReader::feed(const std::uint8_t* data, std::size_t size) {
    buffer_.insert(buffer_.end(), data, data + size);
}

std::optional<Message> MessageReader::next() {
    auto result = decode(buffer_.data(), buffer_.size());
    if (!result.message) return std::nullopt;
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(result.consumed));
    return std::move(result.message);
}

// ---------------------------------------------------------------------------
// agents
// ---------------------------------------------------------------------------

namespace {

class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    Socket& operator=(Socket&& o) noexcept {
        if (this != &o) {
            close_fd();
            fd_ = o.fd_;
            o.fd_ = -1;
        }
        return *this;
    }
    ~Socket() { close_fd(); }
    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }

    void send_all(const std::vector<std::uint8_t>& bytes) const {
        std::size_t sent = 0;
        while (sent < bytes.size()) {
            const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
            if (n <= 0) throw ProtocolError("connection lost while sending");
            sent += static_cast<std::size_t>(n);
        }
    }

    // one recv into the reader; false on orderly shutdown
    bool pump(MessageReader& reader) const {
        std::uint8_t chunk[4096];
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0) throw ProtocolError("connection lost while receiving");
        if (n == 0) return false;
        reader.feed(chunk, static_cast<std::size_t>(n));
        return true;
    }

private:
    void close_fd() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }
    int fd_ = -1;
};

Message read_message(const Socket& sock, MessageReader& reader) {
    for (;;) {
        if (auto msg = reader.next()) return std::move(*msg);
        if (!sock.pump(reader)) throw ProtocolError("connection closed mid-stream");
    }
}

Frame synthetic_frame(std::mt19937_64& rng, int index) {
    // a bright block drifting across a noisy background
    constexpr int w = 64, h = 48;
    Frame f{w, h, std::vector<std::uint8_t>(w * h)};
    for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng() % 32);
    const int bx = (index * 3) % (w - 12), by = (index * 2) % (h - 12);
    for (int y = by; y < by + 12; ++y)
        for (int x = bx; x < bx + 12; ++x) f.pixels[y * w + x] = 220;
    return f;
}

}  // namespace

int run_server_agent(const ServerOptions& options, int* bound_port) {
    Socket listener(::socket(AF_INET, SOCK_STREAM, 0));
    if (!listener.valid()) throw ProtocolError("cannot create listening socket");
    const int one = 1;
    ::setsockopt(listener.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(options.port));
    if (::bind(listener.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
        throw ProtocolError("cannot bind server port");
    if (::listen(listener.fd(), 1) != 0) throw ProtocolError("cannot listen");
    if (bound_port) {
        socklen_t len = sizeof addr;
        ::getsockname(listener.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
        *bound_port = ntohs(addr.sin_port);
    }

    Socket conn(::accept(listener.fd(), nullptr, nullptr));
    if (!conn.valid()) throw ProtocolError("accept failed");
    MessageReader reader;

    const Message hello = read_message(conn, reader);
    if (!std::holds_alternative<Hello>(hello)) throw ProtocolError("expected hello from camera");
    conn.send_all(encode(Hello{"server"}));

    std::ofstream trace_out(options.trace_path);
    if (!trace_out) throw ProtocolError("cannot write " + options.trace_path.string());

    SceneBackend backend(options.scene, options.params.seed);
    const auto profile = offline_profile(options.scene, offline_grid(), 0.0);

    RoundHooks hooks;
    hooks.await_burst = [&](int round) {
        bool in_burst = false;
        for (;;) {
            const Message msg = read_message(conn, reader);
            if (std::holds_alternative<GtBurstBegin>(msg)) {
                in_burst = true;
            } else if (std::holds_alternative<GtBurstEnd>(msg)) {
                if (!in_burst) throw ProtocolError("burst end without begin");
                return;
            } else if (std::holds_alternative<FrameMsg>(msg) ||
                       std::holds_alternative<Detections>(msg)) {
                // exploit-phase traffic and burst frames are drained here;
                // the scene backend is the evaluator, so their content does
                // not enter the trace
            } else if (std::holds_alternative<Bye>(msg)) {
                throw ProtocolError("camera left before round " + std::to_string(round));
            } else {
                throw ProtocolError("unexpected message while awaiting burst");
            }
        }
    };
    hooks.publish_config = [&](const Configuration& config, int round, bool) {
        conn.send_all(encode(ConfigUpdate{config.threshold, config.bitrate_kbps,
                                          options.params.exploit_duration_s, round}));
    };
    hooks.on_event = [&](const TraceEvent& ev) {
        trace_out << trace_event_line(ev) << "\n";
        trace_out.flush();  // partial trace survives a dropped connection
    };

    int status = 0;
    try {
        const RunResult result = run_online(options.params, backend, profile, options.baseline,
                                            &hooks);
        write_summary_json(result.summary, options.summary_path);
        conn.send_all(encode(SummaryMsg{nlohmann::json::parse(summary_json(result.summary))}));
        conn.send_all(encode(Bye{}));
        // drain until the camera's bye
        for (;;) {
            const Message msg = read_message(conn, reader);
            if (std::holds_alternative<Bye>(msg)) break;
        }
    } catch (const ProtocolError&) {
        status = 1;  // trace flushed up to the failure point
    }
    trace_out.flush();
    return status;
}

int run_camera_agent(const CameraOptions& options) {
    Socket sock(::socket(AF_INET, SOCK_STREAM, 0));
    if (!sock.valid()) throw ProtocolError("cannot create socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(options.port));
    if (::inet_pton(AF_INET, options.host.c_str(), &addr.sin_addr) != 1) {
        hostent* host = ::gethostbyname(options.host.c_str());
        if (!host || host->h_addrtype != AF_INET) throw ProtocolError("cannot resolve host");
        std::memcpy(&addr.sin_addr, host->h_addr_list[0], sizeof addr.sin_addr);
    }
    if (::connect(sock.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
        throw ProtocolError("cannot connect to server");

    MessageReader reader;
    sock.send_all(encode(Hello{"camera"}));
    const Message hello = read_message(sock, reader);
    if (!std::holds_alternative<Hello>(hello)) throw ProtocolError("expected hello from server");

    std::vector<Frame> source;
    if (!options.frames_dir.empty()) source = load_frame_dir(options.frames_dir);
    std::mt19937_64 rng(options.seed);
    auto frame_at = [&](int index) {
        if (!source.empty()) return source[static_cast<std::size_t>(index) % source.size()];
        return synthetic_frame(rng, index);
    };

    double threshold = options.threshold;
    int bitrate = options.bitrate_kbps;
    int frame_index = 0;
    int round = 1;
    double t_s = 0.0;

    for (;;) {
        // ground-truth burst: unfiltered, maximum bitrate
        sock.send_all(encode(GtBurstBegin{round, t_s, kBurstFrameCount, 3000}));
        for (int i = 0; i < kBurstFrameCount; ++i) {
            const Frame f = frame_at(frame_index + i);
            std::vector<std::uint8_t> raw;
            raw.reserve(f.pixels.size() + 32);
            const std::string header = "P5\n" + std::to_string(f.width) + " " +
                                       std::to_string(f.height) + "\n255\n";
            raw.insert(raw.end(), header.begin(), header.end());
            raw.insert(raw.end(), f.pixels.begin(), f.pixels.end());
            FrameMsg msg;
            msg.frame_index = frame_index + i;
            msg.data_b64 = base64_encode(raw.data(), raw.size());
            sock.send_all(encode(msg));
        }
        frame_index += kBurstFrameCount;
        sock.send_all(encode(GtBurstEnd{round}));

        // wait for the round's config decision (or the end of the run)
        double exploit_s = 60.0;
        for (;;) {
            const Message msg = read_message(sock, reader);
            if (const auto* update = std::get_if<ConfigUpdate>(&msg)) {
                threshold = update->threshold;
                bitrate = update->bitrate_kbps;
                exploit_s = update->exploit_s;
                break;
            }
            if (std::holds_alternative<SummaryMsg>(msg)) continue;
            if (std::holds_alternative<Bye>(msg)) {
                sock.send_all(encode(Bye{}));
                return 0;
            }
        }

        // exploit: filter at the current threshold, report kept frame indices
        (void)bitrate;
        Frame prev = frame_at(frame_index - 1);
        const int exploit_frames = static_cast<int>(exploit_s) * kBurstFps;
        for (int i = 0; i < exploit_frames; ++i) {
            const Frame curr = frame_at(frame_index + i);
            const bool keep = i == 0 || pixel_diff(prev, curr) >= threshold;
            if (keep) {
                FrameMsg msg;
                msg.frame_index = frame_index + i;
                msg.ref = "frame:" + std::to_string(frame_index + i);
                sock.send_all(encode(msg));
            }
            prev = curr;
        }
        frame_index += exploit_frames;
        t_s += 5.0 + exploit_s;
        ++round;
    }
}

}  // namespace ecolens::protocol
