#include "vmstain/tiling.hpp"

#include "vmstain/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <string>
#include <thread>

namespace vmstain {

int axis_coverage(int x, int length, int patch, int stride) {
    // Lattice origins o with o <= x < o + patch: the first index is
    // ceil((x - patch + 1) / stride) clamped to 0, the last is
    // min(floor(x / stride), (length - patch) / stride).
    const int first = std::max(0, (x - patch + stride) / stride);
    const int last = std::min(x / stride, (length - patch) / stride);
    return last - first + 1;
}

WeightMatrix::WeightMatrix(const GridSpec& spec) : spec_(spec) {
    spec_.validate();
    row_coverage_.resize(spec_.rows);
    for (int r = 0; r < spec_.rows; ++r) {
        row_coverage_[r] = axis_coverage(r, spec_.rows, spec_.patch, spec_.stride);
    }
    col_coverage_.resize(spec_.cols);
    for (int c = 0; c < spec_.cols; ++c) {
        col_coverage_[c] = axis_coverage(c, spec_.cols, spec_.patch, spec_.stride);
    }
}

PlanarImage WeightMatrix::to_plane() const {
    PlanarImage out(spec_.rows, spec_.cols, 1);
    auto plane = out.plane(0);
    for (int r = 0; r < spec_.rows; ++r) {
        const double wr = 1.0 / row_coverage_[r];
        for (int c = 0; c < spec_.cols; ++c) {
            plane[static_cast<std::size_t>(r) * spec_.cols + c] = wr / col_coverage_[c];
        }
    }
    return out;
}

void WeightMatrix::export_raw(const std::filesystem::path& base) const {
    std::filesystem::path raw_path = base;
    raw_path += ".f32";
    std::ofstream raw(raw_path, std::ios::binary);
    if (!raw) {
        throw IoError("export_raw: cannot open " + raw_path.string());
    }
    std::vector<float> row(static_cast<std::size_t>(spec_.cols));
    for (int r = 0; r < spec_.rows; ++r) {
        for (int c = 0; c < spec_.cols; ++c) {
            row[static_cast<std::size_t>(c)] = static_cast<float>(at(r, c));
        }
        raw.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }

    nlohmann::json header = {
        {"rows", spec_.rows}, {"cols", spec_.cols},
        {"n", spec_.patch},   {"m", spec_.stride},
        {"dtype", "float32_le"},
    };
    if (spec_.rows == spec_.cols) header["side"] = spec_.rows;
    std::filesystem::path json_path = base;
    json_path += ".json";
    std::ofstream meta(json_path);
    meta << header.dump(2) << "\n";
}

namespace {

// Tracks which lattice origins have been consumed.
class OriginLedger {
public:
    explicit OriginLedger(const GridSpec& spec)
        : spec_(spec), seen_(static_cast<std::size_t>(spec.patch_count()), false) {}

    void mark(const PatchRecord& p) {
        if (p.origin_row < 0 || p.origin_col < 0 || p.origin_row % spec_.stride != 0 ||
            p.origin_col % spec_.stride != 0 || p.origin_row + spec_.patch > spec_.rows ||
            p.origin_col + spec_.patch > spec_.cols) {
            throw ContractError("blend: patch origin (" + std::to_string(p.origin_row) + "," +
                                std::to_string(p.origin_col) + ") is not a lattice point");
        }
        if (p.pixels.height() != spec_.patch || p.pixels.width() != spec_.patch) {
            throw ContractError("blend: patch at (" + std::to_string(p.origin_row) + "," +
                                std::to_string(p.origin_col) + ") has size " +
                                std::to_string(p.pixels.height()) + "x" +
                                std::to_string(p.pixels.width()) + ", expected " +
                                std::to_string(spec_.patch));
        }
        const std::size_t idx = index(p.origin_row, p.origin_col);
        if (seen_[idx]) {
            throw ContractError("blend: duplicate patch at origin (" +
                                std::to_string(p.origin_row) + "," +
                                std::to_string(p.origin_col) + ")");
        }
        seen_[idx] = true;
        ++count_;
    }

    void require_complete() const {
        if (count_ == static_cast<long>(seen_.size())) return;
        std::string gaps;
        int listed = 0;
        for (std::size_t i = 0; i < seen_.size(); ++i) {
            if (seen_[i]) continue;
            const int r = static_cast<int>(i) / spec_.col_origins() * spec_.stride;
            const int c = static_cast<int>(i) % spec_.col_origins() * spec_.stride;
            if (listed++ < 8) {
                gaps += " (" + std::to_string(r) + "," + std::to_string(c) + ")";
            }
        }
        throw ContractError("blend: " + std::to_string(seen_.size() - count_) +
                            " lattice position(s) missing:" + gaps +
                            (listed > 8 ? " ..." : ""));
    }

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row / spec_.stride) * spec_.col_origins() +
               col / spec_.stride;
    }

    GridSpec spec_;
    std::vector<bool> seen_;
    long count_ = 0;
};

void accumulate_rows(PlanarImage& acc, const PatchRecord& p, const WeightMatrix& w,
                     int row_begin, int row_end) {
    const int channels = p.pixels.channels();
    const int n = p.pixels.width();
    for (int c = 0; c < channels; ++c) {
        for (int r = row_begin; r < row_end; ++r) {
            const int out_r = p.origin_row + r;
            for (int col = 0; col < n; ++col) {
                acc.at(c, out_r, p.origin_col + col) +=
                    p.pixels.at(c, r, col) * w.at(out_r, p.origin_col + col);
            }
        }
    }
}

} // namespace

TiledOutput blend_naive(const std::vector<PatchRecord>& patches, const WeightMatrix& w) {
    const GridSpec& spec = w.spec();
    OriginLedger ledger(spec);
    const PlanarImage weights = w.to_plane();
    const auto wp = weights.plane(0);

    const int channels = patches.empty() ? 3 : patches.front().pixels.channels();
    PlanarImage out(spec.rows, spec.cols, channels);
    for (const PatchRecord& p : patches) {
        ledger.mark(p);
        const PlanarImage padded = place_zero_padded(p, spec.rows, spec.cols);
        for (int c = 0; c < channels; ++c) {
            auto op = out.plane(c);
            const auto pp = padded.plane(c);
            for (std::size_t i = 0; i < op.size(); ++i) {
                op[i] += pp[i] * wp[i];
            }
        }
    }
    ledger.require_complete();
    return {std::move(out), spec};
}

TiledOutput blend_streaming(const PatchSource& source, const GridSpec& spec, int workers) {
    spec.validate();
    if (workers < 1) {
        throw ContractError("blend_streaming: worker count must be >= 1");
    }
    const WeightMatrix w(spec);
    OriginLedger ledger(spec);
    PlanarImage acc(spec.rows, spec.cols, 3);

    // Fixed accumulator row bands, one owner each. Only one patch is in
    // flight, so per-pixel accumulation order equals arrival order for
    // every worker count.
    while (std::optional<PatchRecord> patch = source()) {
        ledger.mark(*patch);
        const int n = patch->pixels.height();
        if (workers == 1 || n < 2 * workers) {
            accumulate_rows(acc, *patch, w, 0, n);
            continue;
        }
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(workers));
        for (int k = 0; k < workers; ++k) {
            const int begin = static_cast<int>(static_cast<long>(n) * k / workers);
            const int end = static_cast<int>(static_cast<long>(n) * (k + 1) / workers);
            threads.emplace_back(accumulate_rows, std::ref(acc), std::cref(*patch),
                                 std::cref(w), begin, end);
        }
        for (std::thread& t : threads) t.join();
    }
    ledger.require_complete();
    return {std::move(acc), spec};
}

} // namespace vmstain
