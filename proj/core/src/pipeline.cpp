#include "vmstain/pipeline.hpp"

#include "vmstain/errors.hpp"
#include "vmstain/image_io.hpp"
#include "vmstain/metrics.hpp"
#include "vmstain/tiling.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

namespace vmstain {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("config: unknown key '" + key + "' in " + where);
        }
    }
}

BackendSpec parse_backend(const nlohmann::json& obj, std::uint64_t job_seed) {
    if (!obj.is_object()) {
        throw ConfigError("config: 'backend' must be an object");
    }
    const std::string kind = obj.value("kind", "identity");
    BackendSpec spec;
    if (kind == "identity") {
        reject_unknown_keys(obj, {"kind"}, "backend");
        spec.kind = BackendSpec::Kind::identity;
    } else if (kind == "color_matrix") {
        reject_unknown_keys(obj, {"kind", "matrix", "bias"}, "backend");
        spec.kind = BackendSpec::Kind::color_matrix;
        if (obj.contains("matrix")) {
            const auto m = obj.at("matrix").get<std::vector<double>>();
            if (m.size() != 9) throw ConfigError("config: backend.matrix must have 9 entries");
            std::copy(m.begin(), m.end(), spec.color_matrix.matrix.begin());
        }
        if (obj.contains("bias")) {
            const auto b = obj.at("bias").get<std::vector<double>>();
            if (b.size() != 3) throw ConfigError("config: backend.bias must have 3 entries");
            std::copy(b.begin(), b.end(), spec.color_matrix.bias.begin());
        }
    } else if (kind == "contrast_jitter") {
        reject_unknown_keys(obj, {"kind", "gain_lo", "gain_hi", "seed"}, "backend");
        spec.kind = BackendSpec::Kind::contrast_jitter;
        spec.contrast_jitter.gain_lo = obj.value("gain_lo", 0.9);
        spec.contrast_jitter.gain_hi = obj.value("gain_hi", 1.1);
        spec.contrast_jitter.seed = obj.value("seed", job_seed);
    } else if (kind == "external") {
        reject_unknown_keys(obj, {"kind", "command", "timeout_seconds"}, "backend");
        spec.kind = BackendSpec::Kind::external;
        spec.external.command = obj.at("command").get<std::vector<std::string>>();
        spec.external.timeout_seconds = obj.value("timeout_seconds", 60.0);
    } else {
        throw ConfigError("config: unknown backend kind '" + kind + "'");
    }
    spec.validate();
    return spec;
}

nlohmann::json backend_to_json(const BackendSpec& spec) {
    switch (spec.kind) {
        case BackendSpec::Kind::identity:
            return {{"kind", "identity"}};
        case BackendSpec::Kind::color_matrix:
            return {{"kind", "color_matrix"},
                    {"matrix", spec.color_matrix.matrix},
                    {"bias", spec.color_matrix.bias}};
        case BackendSpec::Kind::contrast_jitter:
            return {{"kind", "contrast_jitter"},
                    {"gain_lo", spec.contrast_jitter.gain_lo},
                    {"gain_hi", spec.contrast_jitter.gain_hi},
                    {"seed", spec.contrast_jitter.seed}};
        case BackendSpec::Kind::external:
            return {{"kind", "external"},
                    {"command", spec.external.command},
                    {"timeout_seconds", spec.external.timeout_seconds}};
    }
    return {};
}

std::string patch_filename(int row, int col) {
    return "patch_r" + std::to_string(row) + "_c" + std::to_string(col) + ".png";
}

// Transforms patches in place, preserving order. Built-in backends fan
// out over a worker pool; the external kind runs `workers` independent
// sessions, each owning a disjoint index stripe.
void apply_backend(std::vector<PatchRecord>& patches, const BackendSpec& backend,
                   int workers) {
    if (backend.kind == BackendSpec::Kind::identity) return;

    const int pool = std::max(1, std::min<int>(workers, static_cast<int>(patches.size())));

    if (backend.kind == BackendSpec::Kind::external) {
        const int patch_size = patches.empty() ? 0 : patches.front().pixels.height();
        std::vector<std::thread> threads;
        std::mutex error_mutex;
        std::exception_ptr error;
        for (int k = 0; k < pool; ++k) {
            threads.emplace_back([&, k] {
                try {
                    ExternalSession session(backend.external, patch_size);
                    for (std::size_t i = k; i < patches.size(); i += pool) {
                        patches[i] = session.transform(patches[i]);
                    }
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            });
        }
        for (std::thread& t : threads) t.join();
        if (error) std::rethrow_exception(error);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    std::mutex error_mutex;
    std::exception_ptr error;
    for (int k = 0; k < pool; ++k) {
        threads.emplace_back([&] {
            try {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= patches.size()) break;
                    patches[i] = apply(backend, patches[i]);
                }
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (std::thread& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

PlanarImage crop(const PlanarImage& img, int rows, int cols) {
    if (rows == img.height() && cols == img.width()) return img;
    PlanarImage out(rows, cols, img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        for (int r = 0; r < rows; ++r) {
            for (int col = 0; col < cols; ++col) {
                out.at(c, r, col) = img.at(c, r, col);
            }
        }
    }
    return out;
}

PatchSource vector_source(std::vector<PatchRecord>& patches) {
    auto index = std::make_shared<std::size_t>(0);
    return [&patches, index]() -> std::optional<PatchRecord> {
        if (*index >= patches.size()) return std::nullopt;
        return std::move(patches[(*index)++]);
    };
}

} // namespace

void JobConfig::validate() const {
    if (input.empty() || output.empty()) {
        throw ConfigError("config: input and output paths are required");
    }
    if (input == output) {
        throw ConfigError("config: input and output paths must be distinct");
    }
    if (stride < 1 || patch < 1 || patch % stride != 0) {
        throw ConfigError("config: n/m must be an integer (n = " + std::to_string(patch) +
                          ", m = " + std::to_string(stride) + ")");
    }
    if (workers < 1) {
        throw ConfigError("config: worker count must be >= 1");
    }
    backend.validate();
}

JobConfig parse_job_config(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("config: document must be a JSON object");
    }
    reject_unknown_keys(doc, {"input", "output", "n", "m", "backend", "metrics",
                              "workers", "seed"},
                        "job config");

    JobConfig config;
    config.input = doc.at("input").get<std::string>();
    config.output = doc.at("output").get<std::string>();
    config.patch = doc.value("n", 512);
    config.stride = doc.value("m", 128);
    config.workers = doc.value("workers", 1);
    config.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("backend")) {
        config.backend = parse_backend(doc.at("backend"), config.seed);
    }
    if (doc.contains("metrics")) {
        const auto& metrics = doc.at("metrics");
        reject_unknown_keys(metrics, {"seam", "hist_corr"}, "metrics");
        config.metric_seam = metrics.value("seam", false);
        config.metric_hist_corr = metrics.value("hist_corr", false);
    }
    config.validate();
    return config;
}

JobConfig load_job_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: invalid JSON in " + path.string() + ": " + e.what());
    }
    return parse_job_config(doc);
}

nlohmann::json job_config_to_json(const JobConfig& config) {
    return {{"input", config.input.string()},
            {"output", config.output.string()},
            {"n", config.patch},
            {"m", config.stride},
            {"backend", backend_to_json(config.backend)},
            {"metrics", {{"seam", config.metric_seam}, {"hist_corr", config.metric_hist_corr}}},
            {"workers", config.workers},
            {"seed", config.seed}};
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json doc = {
        {"config", config_echo},
        {"original", {{"rows", original_rows}, {"cols", original_cols}}},
        {"padded", {{"rows", padded_rows}, {"cols", padded_cols}}},
        {"patch_count", patch_count},
        {"timings_seconds",
         {{"split", split_seconds},
          {"backend", backend_seconds},
          {"blend", blend_seconds},
          {"total", total_seconds}}},
        {"checksums", {{"input", input_checksum}, {"output", output_checksum}}},
    };
    if (!metrics.is_null()) doc["metrics"] = metrics;
    return doc;
}

RunManifest run(const JobConfig& config) {
    config.validate();
    const auto t_total = Clock::now();

    RunManifest manifest;
    manifest.config_echo = job_config_to_json(config);
    manifest.input_checksum = file_checksum(config.input);

    const PlanarImage input = load_image(config.input);

    auto t_stage = Clock::now();
    PaddedImage padded = pad_to_grid(input, config.patch, config.stride);
    std::vector<PatchRecord> patches = split(padded.image, padded.spec);
    manifest.split_seconds = seconds_since(t_stage);
    manifest.original_rows = padded.original_rows;
    manifest.original_cols = padded.original_cols;
    manifest.padded_rows = padded.spec.rows;
    manifest.padded_cols = padded.spec.cols;
    manifest.patch_count = padded.spec.patch_count();

    // contrast_jitter inherits the job seed unless the backend pinned one.
    BackendSpec backend = config.backend;
    if (backend.kind == BackendSpec::Kind::contrast_jitter &&
        backend.contrast_jitter.seed == 0) {
        backend.contrast_jitter.seed = config.seed;
    }

    t_stage = Clock::now();
    try {
        apply_backend(patches, backend, config.workers);
    } catch (const std::exception& e) {
        throw BackendError(std::string("backend stage failed: ") + e.what());
    }
    manifest.backend_seconds = seconds_since(t_stage);

    t_stage = Clock::now();
    TiledOutput tiled = blend_streaming(vector_source(patches), padded.spec, config.workers);
    manifest.blend_seconds = seconds_since(t_stage);

    const PlanarImage output = crop(tiled.image, padded.original_rows, padded.original_cols);
    save_image(config.output, output);
    manifest.output_checksum = file_checksum(config.output);

    if (config.metric_seam || config.metric_hist_corr) {
        nlohmann::json metrics;
        if (config.metric_seam) {
            metrics["seam_discontinuity"] = seam_discontinuity(output, config.patch);
        }
        if (config.metric_hist_corr) {
            try {
                metrics["histogram_correlation"] = histogram_correlation(input, output);
            } catch (const DomainError& e) {
                metrics["histogram_correlation_error"] = e.what();
            }
        }
        manifest.metrics = metrics;
    }

    manifest.total_seconds = seconds_since(t_total);

    std::filesystem::path manifest_path = config.output;
    manifest_path += ".manifest.json";
    std::ofstream out(manifest_path);
    out << manifest.to_json().dump(2) << "\n";
    return manifest;
}

nlohmann::json split_to_dir(const std::filesystem::path& input, int patch, int stride,
                            const std::filesystem::path& out_dir) {
    const PlanarImage img = load_image(input);
    const PaddedImage padded = pad_to_grid(img, patch, stride);
    std::filesystem::create_directories(out_dir);

    nlohmann::json origins = nlohmann::json::array();
    for (const PatchRecord& rec : split(padded.image, padded.spec)) {
        save_image(out_dir / patch_filename(rec.origin_row, rec.origin_col), rec.pixels);
        origins.push_back({rec.origin_row, rec.origin_col});
    }

    nlohmann::json manifest = {
        {"grid",
         {{"rows", padded.spec.rows},
          {"cols", padded.spec.cols},
          {"n", padded.spec.patch},
          {"m", padded.spec.stride}}},
        {"original", {{"rows", padded.original_rows}, {"cols", padded.original_cols}}},
        {"padding",
         {{"bottom", padded.spec.rows - padded.original_rows},
          {"right", padded.spec.cols - padded.original_cols}}},
        {"row_origins", padded.spec.row_origins()},
        {"col_origins", padded.spec.col_origins()},
        {"origins", origins},
    };
    std::ofstream out(out_dir / "manifest.json");
    out << manifest.dump(2) << "\n";
    return manifest;
}

void tile_from_dir(const std::filesystem::path& manifest_path,
                   const std::filesystem::path& patches_dir,
                   const std::filesystem::path& output, int workers) {
    std::ifstream in(manifest_path);
    if (!in) {
        throw IoError("cannot open manifest " + manifest_path.string());
    }
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("manifest: invalid JSON: " + std::string(e.what()));
    }

    GridSpec spec;
    spec.rows = manifest.at("grid").at("rows").get<int>();
    spec.cols = manifest.at("grid").at("cols").get<int>();
    spec.patch = manifest.at("grid").at("n").get<int>();
    spec.stride = manifest.at("grid").at("m").get<int>();
    spec.validate();
    const int original_rows = manifest.at("original").at("rows").get<int>();
    const int original_cols = manifest.at("original").at("cols").get<int>();

    std::vector<PatchOrigin> origins;
    for (const auto& o : manifest.at("origins")) {
        origins.push_back({o.at(0).get<int>(), o.at(1).get<int>()});
    }

    // Validate the directory against the manifest before any blending.
    std::set<std::string> expected;
    std::string missing, extra;
    for (const PatchOrigin& o : origins) {
        const std::string name = patch_filename(o.row, o.col);
        expected.insert(name);
        if (!std::filesystem::exists(patches_dir / name)) {
            missing += " " + name;
        }
    }
    for (const auto& entry : std::filesystem::directory_iterator(patches_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.starts_with("patch_") && name.ends_with(".png") && !expected.contains(name)) {
            extra += " " + name;
        }
    }
    if (!missing.empty() || !extra.empty()) {
        std::string msg = "tile: patch directory inconsistent with manifest;";
        if (!missing.empty()) msg += " missing:" + missing;
        if (!extra.empty()) msg += " extra:" + extra;
        throw ContractError(msg);
    }

    std::size_t index = 0;
    PatchSource source = [&]() -> std::optional<PatchRecord> {
        if (index >= origins.size()) return std::nullopt;
        const PatchOrigin o = origins[index++];
        PatchRecord rec;
        rec.origin_row = o.row;
        rec.origin_col = o.col;
        rec.pixels = load_image(patches_dir / patch_filename(o.row, o.col));
        return rec;
    };

    TiledOutput tiled = blend_streaming(source, spec, workers);
    save_image(output, crop(tiled.image, original_rows, original_cols));
}

std::string file_checksum(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("checksum: cannot open " + path.string());
    }
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buffer[65536];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            hash ^= static_cast<std::uint8_t>(buffer[i]);
            hash *= 0x100000001b3ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return {hex};
}

} // namespace vmstain
