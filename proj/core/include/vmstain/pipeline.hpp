#pragma once

#include "vmstain/backends.hpp"
#include "vmstain/patchgrid.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace vmstain {

struct JobConfig {
    std::filesystem::path input;
    std::filesystem::path output;
    int patch = 512;  // n
    int stride = 128; // m
    BackendSpec backend;
    bool metric_seam = false;
    bool metric_hist_corr = false;
    int workers = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Parses a job config document. Unknown keys anywhere in the document
/// are rejected (fail-closed).
JobConfig parse_job_config(const nlohmann::json& doc);
JobConfig load_job_config(const std::filesystem::path& path);
nlohmann::json job_config_to_json(const JobConfig& config);

struct RunManifest {
    nlohmann::json config_echo;
    int original_rows = 0, original_cols = 0;
    int padded_rows = 0, padded_cols = 0;
    long patch_count = 0;
    double split_seconds = 0.0;
    double backend_seconds = 0.0;
    double blend_seconds = 0.0;
    double total_seconds = 0.0;
    std::string input_checksum;
    std::string output_checksum;
    nlohmann::json metrics; // present when toggled on

    nlohmann::json to_json() const;
};

/// End-to-end: load, pad, split, transform, blend, crop, save. Writes
/// <output>.manifest.json alongside the output image. Reruns with the
/// same config, seed, and input produce byte-identical outputs for any
/// worker count.
RunManifest run(const JobConfig& config);

/// Stage-wise entry points (CLI subcommands). split_to_dir writes
/// patch_r{row}_c{col}.png files plus manifest.json; tile_from_dir
/// validates the directory against the manifest and reassembles.
nlohmann::json split_to_dir(const std::filesystem::path& input, int patch, int stride,
                            const std::filesystem::path& out_dir);
void tile_from_dir(const std::filesystem::path& manifest_path,
                   const std::filesystem::path& patches_dir,
                   const std::filesystem::path& output, int workers = 1);

/// FNV-1a 64-bit checksum of a file's bytes, as a hex string.
std::string file_checksum(const std::filesystem::path& path);

} // namespace vmstain
