// vmstain: split / transform / tile whole-slide images with
// confidence-weighted patch blending, plus loss and metric utilities.

#include "vmstain/colorspace.hpp"
#include "vmstain/errors.hpp"
#include "vmstain/image_io.hpp"
#include "vmstain/losses.hpp"
#include "vmstain/metrics.hpp"
#include "vmstain/pipeline.hpp"
#include "vmstain/tiling.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <string>

namespace {

using vmstain::PlanarImage;

std::pair<int, int> parse_coord(const std::string& text, const std::string& flag) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw vmstain::ConfigError(flag + ": expected 'row,col', got '" + text + "'");
    }
    try {
        return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw vmstain::ConfigError(flag + ": expected 'row,col', got '" + text + "'");
    }
}

nlohmann::json loss_report_json(const vmstain::LossReport& report) {
    return {{"adv_ab", report.adv_ab},
            {"adv_ba", report.adv_ba},
            {"cycle", report.cycle},
            {"value_a", report.value_a},
            {"value_b", report.value_b},
            {"total", report.total},
            {"weights",
             {{"lambda_cycle", report.weights.lambda_cycle},
              {"lambda_value", report.weights.lambda_value}}}};
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Whole-slide image split/transform/tile pipeline"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "Run a full job from a JSON config");
    std::string config_path;
    run_cmd->add_option("--config", config_path, "Job config JSON file")->required();

    // split
    auto* split_cmd = app.add_subcommand("split", "Crop an image into overlapping patches");
    std::string split_input, split_out_dir;
    int split_n = 512, split_m = 128;
    split_cmd->add_option("--input", split_input, "Input image (PNG/TIFF)")->required();
    split_cmd->add_option("--n", split_n, "Patch size");
    split_cmd->add_option("--m", split_m, "Stride (filling interval)");
    split_cmd->add_option("--out-dir", split_out_dir, "Output patch directory")->required();

    // tile
    auto* tile_cmd = app.add_subcommand("tile", "Blend a patch directory into one image");
    std::string tile_manifest, tile_patches_dir, tile_out;
    int tile_workers = 1;
    tile_cmd->add_option("--manifest", tile_manifest, "Split manifest JSON")->required();
    tile_cmd->add_option("--patches-dir", tile_patches_dir, "Patch directory")->required();
    tile_cmd->add_option("--out", tile_out, "Output image")->required();
    tile_cmd->add_option("--workers", tile_workers, "Blend worker count");

    // weight
    auto* weight_cmd = app.add_subcommand("weight", "Export the blending weight matrix");
    int weight_l = 0, weight_rows = 0, weight_cols = 0, weight_n = 512, weight_m = 128;
    std::string weight_out;
    weight_cmd->add_option("--l", weight_l, "Square image side");
    weight_cmd->add_option("--rows", weight_rows, "Image height (if not square)");
    weight_cmd->add_option("--cols", weight_cols, "Image width (if not square)");
    weight_cmd->add_option("--n", weight_n, "Patch size");
    weight_cmd->add_option("--m", weight_m, "Stride");
    weight_cmd->add_option("--out", weight_out, "Output base path (.f32 + .json)")->required();

    // metrics
    auto* metrics_cmd = app.add_subcommand("metrics", "Image quality measurements");
    metrics_cmd->require_subcommand(1);

    auto* hist_cmd = metrics_cmd->add_subcommand("hist-corr", "Histogram correlation");
    std::string hist_a, hist_b;
    hist_cmd->add_option("a", hist_a, "First image")->required();
    hist_cmd->add_option("b", hist_b, "Second image")->required();

    auto* seam_cmd = metrics_cmd->add_subcommand("seam", "Seam discontinuity");
    std::string seam_img;
    int seam_n = 512;
    seam_cmd->add_option("img", seam_img, "Image")->required();
    seam_cmd->add_option("--n", seam_n, "Tile size defining the boundaries")->required();

    auto* profile_cmd = metrics_cmd->add_subcommand("profile", "Line profile to CSV");
    std::string profile_img, profile_from, profile_to, profile_csv;
    profile_cmd->add_option("img", profile_img, "Image")->required();
    profile_cmd->add_option("--from", profile_from, "Start 'row,col'")->required();
    profile_cmd->add_option("--to", profile_to, "End 'row,col'")->required();
    profile_cmd->add_option("--csv", profile_csv, "Output CSV path")->required();

    // loss
    auto* loss_cmd = app.add_subcommand("loss", "Loss components between image files");
    loss_cmd->require_subcommand(1);
    double lambda_cycle = 10.0, lambda_value = 5.0;
    loss_cmd->add_option("--lambda-cycle", lambda_cycle, "Cycle loss weight");
    loss_cmd->add_option("--lambda-value", lambda_value, "Value loss weight");

    auto* loss_value_cmd = loss_cmd->add_subcommand("value", "Value-channel L1 loss");
    std::string lv_a, lv_b;
    loss_value_cmd->add_option("a", lv_a, "Reference image")->required();
    loss_value_cmd->add_option("b", lv_b, "Generated image")->required();

    auto* loss_cycle_cmd =
        loss_cmd->add_subcommand("cycle", "Cycle reconstruction L1 loss");
    std::string lc_a, lc_aba, lc_b, lc_bab;
    loss_cycle_cmd->add_option("a", lc_a, "Domain A image")->required();
    loss_cycle_cmd->add_option("aba", lc_aba, "Reconstructed A image")->required();
    loss_cycle_cmd->add_option("b", lc_b, "Domain B image (optional second direction)");
    loss_cycle_cmd->add_option("bab", lc_bab, "Reconstructed B image");

    CLI11_PARSE(app, argc, argv);

    if (*run_cmd) {
        const vmstain::RunManifest manifest = vmstain::run(vmstain::load_job_config(config_path));
        std::cout << manifest.to_json().dump(2) << "\n";
        return 0;
    }

    if (*split_cmd) {
        const nlohmann::json manifest =
            vmstain::split_to_dir(split_input, split_n, split_m, split_out_dir);
        std::cout << manifest.dump(2) << "\n";
        return 0;
    }

    if (*tile_cmd) {
        vmstain::tile_from_dir(tile_manifest, tile_patches_dir, tile_out, tile_workers);
        return 0;
    }

    if (*weight_cmd) {
        if (weight_l > 0) {
            weight_rows = weight_l;
            weight_cols = weight_l;
        }
        vmstain::GridSpec spec{weight_rows, weight_cols, weight_n, weight_m};
        vmstain::WeightMatrix(spec).export_raw(weight_out);
        return 0;
    }

    if (*hist_cmd) {
        const double corr = vmstain::histogram_correlation(vmstain::load_image(hist_a),
                                                           vmstain::load_image(hist_b));
        std::cout << nlohmann::json{{"histogram_correlation", corr}}.dump() << "\n";
        return 0;
    }

    if (*seam_cmd) {
        const double seam = vmstain::seam_discontinuity(vmstain::load_image(seam_img), seam_n);
        std::cout << nlohmann::json{{"seam_discontinuity", seam}, {"n", seam_n}}.dump() << "\n";
        return 0;
    }

    if (*profile_cmd) {
        const auto [r0, c0] = parse_coord(profile_from, "--from");
        const auto [r1, c1] = parse_coord(profile_to, "--to");
        const vmstain::LineProfile profile =
            vmstain::line_profile(vmstain::load_image(profile_img), r0, c0, r1, c1);
        std::ofstream csv(profile_csv);
        if (!csv) {
            throw vmstain::IoError("cannot open CSV output " + profile_csv);
        }
        csv << "index,row,col,r,g,b\n";
        for (std::size_t i = 0; i < profile.positions.size(); ++i) {
            csv << i << "," << profile.rows[i] << "," << profile.cols[i] << ","
                << profile.intensities[0][i] << "," << profile.intensities[1][i] << ","
                << profile.intensities[2][i] << "\n";
        }
        return 0;
    }

    const vmstain::LossWeights weights{lambda_cycle, lambda_value};

    if (*loss_value_cmd) {
        const double loss =
            vmstain::value_loss(vmstain::load_image(lv_a), vmstain::load_image(lv_b));
        vmstain::LossReport report = vmstain::total_loss(0, 0, 0, loss, 0, weights);
        std::cout << loss_report_json(report).dump(2) << "\n";
        return 0;
    }

    if (*loss_cycle_cmd) {
        const PlanarImage a = vmstain::load_image(lc_a);
        const PlanarImage aba = vmstain::load_image(lc_aba);
        double loss;
        if (!lc_b.empty() && !lc_bab.empty()) {
            loss = vmstain::cycle_loss(a, aba, vmstain::load_image(lc_b),
                                       vmstain::load_image(lc_bab));
        } else if (lc_b.empty() && lc_bab.empty()) {
            // Single direction: report mean |aba - a| alone.
            loss = vmstain::cycle_loss(a, aba, a, a) ;
        } else {
            throw vmstain::ConfigError("loss cycle: provide both b and bab or neither");
        }
        vmstain::LossReport report = vmstain::total_loss(0, 0, loss, 0, 0, weights);
        std::cout << loss_report_json(report).dump(2) << "\n";
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const vmstain::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const vmstain::ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const vmstain::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
