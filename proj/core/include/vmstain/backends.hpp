#pragma once

#include "vmstain/patchgrid.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vmstain {

struct ColorMatrixParams {
    std::array<double, 9> matrix{1, 0, 0, 0, 1, 0, 0, 0, 1}; // row-major 3x3
    std::array<double, 3> bias{0, 0, 0};
};

struct ContrastJitterParams {
    double gain_lo = 0.9;
    double gain_hi = 1.1;
    std::uint64_t seed = 0;
};

struct ExternalParams {
    std::vector<std::string> command; // argv; command[0] is the executable
    double timeout_seconds = 60.0;
};

/// Per-patch transform stage between split and tiling. A trained
/// generator plugs in as the `external` kind via the framed
/// stdin/stdout protocol; the built-in kinds are deterministic
/// stand-ins for testing and calibration.
struct BackendSpec {
    enum class Kind { identity, color_matrix, contrast_jitter, external };

    Kind kind = Kind::identity;
    ColorMatrixParams color_matrix;
    ContrastJitterParams contrast_jitter;
    ExternalParams external;

    void validate() const;
};

/// Applies a built-in backend to one patch. Origin and dimensions are
/// preserved. contrast_jitter draws one gain per patch, deterministically
/// from seed and origin. Throws for the external kind (use ExternalSession).
PatchRecord apply(const BackendSpec& backend, const PatchRecord& p);

/// Deterministic per-patch gain used by the contrast_jitter backend.
double contrast_jitter_gain(const ContrastJitterParams& params, int origin_row,
                            int origin_col);

/// One persistent child process speaking the framed patch protocol:
/// each frame is a 4-byte big-endian payload length followed by the
/// payload. The handshake exchanges one JSON frame
/// {"patch": n, "version": 1}; after that every request frame carries a
/// PNG-encoded 8-bit RGB patch and elicits exactly one response frame
/// of the same kind, in order.
class ExternalSession {
public:
    ExternalSession(const ExternalParams& params, int patch_size);
    ~ExternalSession();

    ExternalSession(const ExternalSession&) = delete;
    ExternalSession& operator=(const ExternalSession&) = delete;

    /// Sends the patch, waits for the response, checks dimensions.
    /// Throws BackendError carrying the patch origin on any violation.
    PatchRecord transform(const PatchRecord& p);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

namespace framing {

/// Blocking frame I/O on raw file descriptors (protocol plumbing, also
/// usable by child-process implementations).
void write_frame(int fd, const std::vector<std::uint8_t>& payload);

/// Reads one frame; timeout_seconds <= 0 means wait forever. Returns an
/// empty optional on clean EOF at a frame boundary.
std::optional<std::vector<std::uint8_t>> read_frame(int fd, double timeout_seconds);

} // namespace framing

} // namespace vmstain
