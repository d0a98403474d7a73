// Reference implementation of the framed patch protocol (stdin/stdout).
// Useful as a template for wrapping a real model, and as a test double:
//   --mode echo        return every frame unchanged
//   --mode gain        decode, scale by --gain, re-encode
//   --mode wrong-size  return a patch of the wrong dimensions
//   --mode bad-frame   write a truncated frame and exit

#include "vmstain/backends.hpp"
#include "vmstain/image_io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"Framed patch protocol demo child"};
    std::string mode = "echo";
    double gain = 1.0;
    app.add_option("--mode", mode, "echo | gain | wrong-size | bad-frame")
        ->check(CLI::IsMember({"echo", "gain", "wrong-size", "bad-frame"}));
    app.add_option("--gain", gain, "Gain for --mode gain");
    CLI11_PARSE(app, argc, argv);

    using namespace vmstain;

    // Handshake frame first; echoing it back is a conforming reply.
    auto hello = framing::read_frame(STDIN_FILENO, 0);
    if (!hello) return 0;
    framing::write_frame(STDOUT_FILENO, *hello);

    while (auto frame = framing::read_frame(STDIN_FILENO, 0)) {
        if (mode == "echo") {
            framing::write_frame(STDOUT_FILENO, *frame);
            continue;
        }
        if (mode == "bad-frame") {
            const std::uint8_t junk[6] = {0xff, 0xff, 0xff, 0xff, 0x00, 0x01};
            [[maybe_unused]] ssize_t n = ::write(STDOUT_FILENO, junk, sizeof(junk));
            return 0;
        }

        PlanarImage patch = decode_png(*frame);
        if (mode == "wrong-size") {
            PlanarImage half(std::max(1, patch.height() / 2),
                             std::max(1, patch.width() / 2), 3);
            framing::write_frame(STDOUT_FILENO, encode_png(half));
            continue;
        }

        // gain
        auto data = patch.data();
        for (double& v : data) {
            v = std::clamp(v * gain, 0.0, 1.0);
        }
        framing::write_frame(STDOUT_FILENO, encode_png(patch));
    }
    return 0;
}
