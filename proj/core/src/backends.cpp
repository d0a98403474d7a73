#include "vmstain/backends.hpp"

#include "vmstain/errors.hpp"
#include "vmstain/image_io.hpp"

#include <nlohmann/json.hpp>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <string>

namespace vmstain {

void BackendSpec::validate() const {
    switch (kind) {
        case Kind::identity:
            break;
        case Kind::color_matrix:
            for (double v : color_matrix.matrix) {
                if (!std::isfinite(v)) throw ConfigError("color_matrix: non-finite matrix entry");
            }
            for (double v : color_matrix.bias) {
                if (!std::isfinite(v)) throw ConfigError("color_matrix: non-finite bias entry");
            }
            break;
        case Kind::contrast_jitter: {
            const auto& j = contrast_jitter;
            if (!(j.gain_lo > 0.0 && j.gain_hi <= 2.0 && j.gain_lo <= j.gain_hi)) {
                throw ConfigError("contrast_jitter: gain range must be within (0, 2]");
            }
            break;
        }
        case Kind::external:
            if (external.command.empty() || external.command.front().empty()) {
                throw ConfigError("external backend: command must be nonempty");
            }
            if (!(external.timeout_seconds > 0.0)) {
                throw ConfigError("external backend: timeout must be positive");
            }
            break;
    }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

double contrast_jitter_gain(const ContrastJitterParams& params, int origin_row,
                            int origin_col) {
    // Platform-independent mapping, so outputs are reproducible byte for byte.
    std::uint64_t h = splitmix64(params.seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(origin_row)));
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(origin_col)));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    return params.gain_lo + u * (params.gain_hi - params.gain_lo);
}

PatchRecord apply(const BackendSpec& backend, const PatchRecord& p) {
    backend.validate();
    PatchRecord out;
    out.origin_row = p.origin_row;
    out.origin_col = p.origin_col;

    switch (backend.kind) {
        case BackendSpec::Kind::identity:
            out.pixels = p.pixels;
            return out;

        case BackendSpec::Kind::color_matrix: {
            const auto& m = backend.color_matrix.matrix;
            const auto& bias = backend.color_matrix.bias;
            out.pixels = PlanarImage(p.pixels.height(), p.pixels.width(), 3);
            for (int r = 0; r < p.pixels.height(); ++r) {
                for (int c = 0; c < p.pixels.width(); ++c) {
                    const double in[3] = {p.pixels.at(0, r, c), p.pixels.at(1, r, c),
                                          p.pixels.at(2, r, c)};
                    for (int ch = 0; ch < 3; ++ch) {
                        const double v = m[ch * 3 + 0] * in[0] + m[ch * 3 + 1] * in[1] +
                                         m[ch * 3 + 2] * in[2] + bias[ch];
                        out.pixels.at(ch, r, c) = std::clamp(v, 0.0, 1.0);
                    }
                }
            }
            return out;
        }

        case BackendSpec::Kind::contrast_jitter: {
            const double gain =
                contrast_jitter_gain(backend.contrast_jitter, p.origin_row, p.origin_col);
            out.pixels = PlanarImage(p.pixels.height(), p.pixels.width(), p.pixels.channels());
            const auto src = p.pixels.data();
            auto dst = out.pixels.data();
            for (std::size_t i = 0; i < src.size(); ++i) {
                dst[i] = std::clamp(src[i] * gain, 0.0, 1.0);
            }
            return out;
        }

        case BackendSpec::Kind::external:
            throw ContractError("apply: external backend requires an ExternalSession");
    }
    throw ContractError("apply: unknown backend kind");
}

namespace framing {

void write_frame(int fd, const std::vector<std::uint8_t>& payload) {
    const std::uint32_t len = static_cast<std::uint32_t>(payload.size());
    std::uint8_t header[4] = {
        static_cast<std::uint8_t>(len >> 24), static_cast<std::uint8_t>(len >> 16),
        static_cast<std::uint8_t>(len >> 8), static_cast<std::uint8_t>(len)};

    auto write_all = [fd](const std::uint8_t* data, std::size_t size) {
        std::size_t done = 0;
        while (done < size) {
            const ssize_t n = ::write(fd, data + done, size - done);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw BackendError(std::string("frame write failed: ") + std::strerror(errno));
            }
            done += static_cast<std::size_t>(n);
        }
    };
    write_all(header, 4);
    write_all(payload.data(), payload.size());
}

namespace {

// Returns bytes read (0 on EOF); throws on timeout or error.
std::size_t read_some(int fd, std::uint8_t* buf, std::size_t size, double timeout_seconds) {
    if (timeout_seconds > 0.0) {
        pollfd pfd{fd, POLLIN, 0};
        const int timeout_ms = static_cast<int>(timeout_seconds * 1000.0);
        const int rc = ::poll(&pfd, 1, timeout_ms);
        if (rc == 0) {
            throw BackendError("frame read timed out after " +
                               std::to_string(timeout_seconds) + " s");
        }
        if (rc < 0) {
            throw BackendError(std::string("poll failed: ") + std::strerror(errno));
        }
    }
    while (true) {
        const ssize_t n = ::read(fd, buf, size);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw BackendError(std::string("frame read failed: ") + std::strerror(errno));
        }
        return static_cast<std::size_t>(n);
    }
}

} // namespace

std::optional<std::vector<std::uint8_t>> read_frame(int fd, double timeout_seconds) {
    std::uint8_t header[4];
    std::size_t got = 0;
    while (got < 4) {
        const std::size_t n = read_some(fd, header + got, 4 - got, timeout_seconds);
        if (n == 0) {
            if (got == 0) return std::nullopt; // clean EOF between frames
            throw BackendError("EOF inside frame header");
        }
        got += n;
    }
    const std::uint32_t len = (static_cast<std::uint32_t>(header[0]) << 24) |
                              (static_cast<std::uint32_t>(header[1]) << 16) |
                              (static_cast<std::uint32_t>(header[2]) << 8) |
                              static_cast<std::uint32_t>(header[3]);
    constexpr std::uint32_t kMaxFrame = 1u << 30;
    if (len > kMaxFrame) {
        throw BackendError("frame length " + std::to_string(len) + " exceeds limit");
    }
    std::vector<std::uint8_t> payload(len);
    std::size_t done = 0;
    while (done < len) {
        const std::size_t n = read_some(fd, payload.data() + done, len - done, timeout_seconds);
        if (n == 0) throw BackendError("EOF inside frame payload");
        done += n;
    }
    return payload;
}

} // namespace framing

struct ExternalSession::Impl {
    pid_t pid = -1;
    int to_child = -1;   // we write requests here
    int from_child = -1; // we read responses here
    double timeout = 60.0;
    int patch_size = 0;

    ~Impl() {
        if (to_child >= 0) ::close(to_child);
        if (from_child >= 0) ::close(from_child);
        if (pid > 0) {
            ::kill(pid, SIGTERM);
            int status = 0;
            ::waitpid(pid, &status, 0);
        }
    }
};

ExternalSession::ExternalSession(const ExternalParams& params, int patch_size)
    : impl_(std::make_unique<Impl>()) {
    if (params.command.empty()) {
        throw ConfigError("external backend: command must be nonempty");
    }
    impl_->timeout = params.timeout_seconds;
    impl_->patch_size = patch_size;

    int in_pipe[2];  // parent -> child stdin
    int out_pipe[2]; // child stdout -> parent
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
        throw BackendError(std::string("pipe failed: ") + std::strerror(errno));
    }

    const pid_t pid = ::fork();
    if (pid < 0) {
        throw BackendError(std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        std::vector<char*> argv;
        argv.reserve(params.command.size() + 1);
        for (const std::string& arg : params.command) {
            argv.push_back(const_cast<char*>(arg.c_str()));
        }
        argv.push_back(nullptr);
        ::execvp(argv[0], argv.data());
        ::_exit(127);
    }

    impl_->pid = pid;
    impl_->to_child = in_pipe[1];
    impl_->from_child = out_pipe[0];
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);

    // Handshake: one JSON frame each way.
    const nlohmann::json hello = {{"patch", patch_size}, {"version", 1}};
    const std::string hello_str = hello.dump();
    framing::write_frame(impl_->to_child,
                         std::vector<std::uint8_t>(hello_str.begin(), hello_str.end()));
    auto reply = framing::read_frame(impl_->from_child, impl_->timeout);
    if (!reply) {
        throw BackendError("external backend: child closed the stream during handshake");
    }
    try {
        const auto parsed = nlohmann::json::parse(reply->begin(), reply->end());
        if (parsed.at("version").get<int>() != 1) {
            throw BackendError("external backend: unsupported protocol version");
        }
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("external backend: malformed handshake reply: ") +
                           e.what());
    }
}

ExternalSession::~ExternalSession() = default;

PatchRecord ExternalSession::transform(const PatchRecord& p) {
    const std::string origin = "(" + std::to_string(p.origin_row) + "," +
                               std::to_string(p.origin_col) + ")";
    try {
        framing::write_frame(impl_->to_child, encode_png(p.pixels));
        auto reply = framing::read_frame(impl_->from_child, impl_->timeout);
        if (!reply) {
            throw BackendError("child closed the stream mid-session");
        }
        PatchRecord out;
        out.origin_row = p.origin_row;
        out.origin_col = p.origin_col;
        out.pixels = decode_png(*reply);
        if (out.pixels.height() != p.pixels.height() ||
            out.pixels.width() != p.pixels.width()) {
            throw BackendError("response patch is " + std::to_string(out.pixels.height()) +
                               "x" + std::to_string(out.pixels.width()) + ", expected " +
                               std::to_string(p.pixels.height()) + "x" +
                               std::to_string(p.pixels.width()));
        }
        return out;
    } catch (const BackendError& e) {
        throw BackendError("external backend failed for patch at " + origin + ": " + e.what());
    } catch (const IoError& e) {
        throw BackendError("external backend failed for patch at " + origin + ": " + e.what());
    }
}

} // namespace vmstain
