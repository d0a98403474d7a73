#include "vmstain/tiling.hpp"

#include "vmstain/errors.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <random>

using namespace vmstain;
using vmstain::testing::random_image;
using vmstain::testing::random_square_spec;
using vmstain::testing::TempDir;

namespace {

// Brute-force coverage: count lattice windows containing x.
int coverage_oracle(int x, int length, int patch, int stride) {
    int count = 0;
    for (int o = 0; o + patch <= length; o += stride) {
        if (x >= o && x < o + patch) ++count;
    }
    return count;
}

std::vector<PatchRecord> random_patches(std::mt19937_64& rng, const GridSpec& spec) {
    std::vector<PatchRecord> patches;
    for (const PatchOrigin& o : plan_grid(spec)) {
        patches.push_back({o.row, o.col, random_image(rng, spec.patch, spec.patch)});
    }
    return patches;
}

PatchSource source_of(std::vector<PatchRecord> patches) {
    auto state = std::make_shared<std::pair<std::vector<PatchRecord>, std::size_t>>(
        std::move(patches), 0);
    return [state]() -> std::optional<PatchRecord> {
        if (state->second >= state->first.size()) return std::nullopt;
        return std::move(state->first[state->second++]);
    };
}

} // namespace

TEST_CASE("axis coverage matches the brute-force oracle") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 200; ++trial) {
        const GridSpec spec = random_square_spec(rng, 80);
        for (int x = 0; x < spec.rows; ++x) {
            REQUIRE(axis_coverage(x, spec.rows, spec.patch, spec.stride) ==
                    coverage_oracle(x, spec.rows, spec.patch, spec.stride));
        }
    }
}

TEST_CASE("weight matrix structure") {
    SUBCASE("l=8 n=4 m=2 worked values") {
        const WeightMatrix w(GridSpec::square(8, 4, 2));
        const int profile[8] = {1, 1, 2, 2, 2, 2, 1, 1};
        for (int i = 0; i < 8; ++i) {
            REQUIRE(w.row_coverage()[i] == profile[i]);
        }
        CHECK(w.at(0, 0) == 1.0);
        CHECK(w.at(3, 3) == 0.25);
        CHECK(w.at(2, 6) == 0.5);
    }
    SUBCASE("no overlap means all weights 1") {
        const WeightMatrix w(GridSpec::square(12, 4, 4));
        const PlanarImage plane = w.to_plane();
        for (double v : plane.data()) REQUIRE(v == 1.0);
    }
    SUBCASE("paper-scale block structure") {
        const GridSpec spec = GridSpec::square(4608, 512, 128);
        const WeightMatrix w(spec);
        // 36 blocks of 128 per axis, coverage constant within each block.
        for (int block = 0; block < 36; ++block) {
            const int c0 = w.row_coverage()[block * 128];
            for (int i = 1; i < 128; ++i) {
                REQUIRE(w.row_coverage()[block * 128 + i] == c0);
            }
        }
        CHECK(w.at(2304, 2304) == 1.0 / 16.0); // interior: (m/n)^2 with n/m = 4
        CHECK(w.at(0, 0) == 1.0);
    }
    SUBCASE("invariants on random specs") {
        std::mt19937_64 rng(67);
        for (int trial = 0; trial < 50; ++trial) {
            const GridSpec spec = random_square_spec(rng, 60);
            const WeightMatrix w(spec);
            std::uniform_int_distribution<int> coord(0, spec.rows - 1);
            for (int i = 0; i < 200; ++i) {
                const int x = coord(rng), y = coord(rng);
                const int x2 = coord(rng), y2 = coord(rng);
                // centrosymmetry and transpose symmetry
                REQUIRE(w.at(x, y) == w.at(spec.rows - 1 - x, spec.cols - 1 - y));
                REQUIRE(w.at(x, y) == w.at(y, x));
                // rank-one separability
                REQUIRE(w.at(x, y) * w.at(x2, y2) ==
                        doctest::Approx(w.at(x, y2) * w.at(x2, y)).epsilon(1e-12));
                // constant on aligned stride x stride blocks
                const int bx = (x / spec.stride) * spec.stride;
                const int by = (y / spec.stride) * spec.stride;
                REQUIRE(w.at(x, y) == w.at(bx, by));
                // positive
                REQUIRE(w.at(x, y) > 0.0);
            }
        }
    }
    SUBCASE("partition of unity on random specs") {
        std::mt19937_64 rng(71);
        for (int trial = 0; trial < 50; ++trial) {
            const GridSpec spec = random_square_spec(rng, 48);
            const WeightMatrix w(spec);
            const auto origins = plan_grid(spec);
            for (int x = 0; x < spec.rows; ++x) {
                for (int y = 0; y < spec.cols; ++y) {
                    double sum = 0.0;
                    for (const PatchOrigin& o : origins) {
                        if (x >= o.row && x < o.row + spec.patch && y >= o.col &&
                            y < o.col + spec.patch) {
                            sum += w.at(x, y);
                        }
                    }
                    REQUIRE(std::fabs(sum - 1.0) <= 1e-12);
                }
            }
        }
    }
    SUBCASE("unaligned spec rejected") {
        CHECK_THROWS_AS(WeightMatrix(GridSpec{9, 9, 4, 2}), ConfigError);
    }
}

TEST_CASE("raw weight export round-trips") {
    TempDir dir("weights");
    const GridSpec spec = GridSpec::square(8, 4, 2);
    const WeightMatrix w(spec);
    w.export_raw(dir.path() / "w");

    std::ifstream raw(dir.path() / "w.f32", std::ios::binary);
    REQUIRE(raw.good());
    std::vector<float> values(64);
    raw.read(reinterpret_cast<char*>(values.data()), 64 * sizeof(float));
    REQUIRE(raw.gcount() == 64 * sizeof(float));
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) {
            REQUIRE(values[r * 8 + c] == static_cast<float>(w.at(r, c)));
        }
    }
    REQUIRE(std::filesystem::exists(dir.path() / "w.json"));
}

TEST_CASE("blend_naive") {
    std::mt19937_64 rng(73);
    SUBCASE("identity patches reproduce the input") {
        const GridSpec spec = GridSpec::square(16, 8, 2);
        const PlanarImage img = random_image(rng, 16, 16);
        const TiledOutput out = blend_naive(split(img, spec), WeightMatrix(spec));
        for (std::size_t i = 0; i < img.data().size(); ++i) {
            REQUIRE(std::fabs(out.image.data()[i] - img.data()[i]) <= 1e-12);
        }
    }
    SUBCASE("constant patches blend to the same constant") {
        const GridSpec spec = GridSpec::square(8, 4, 2);
        std::vector<PatchRecord> patches;
        for (const PatchOrigin& o : plan_grid(spec)) {
            patches.push_back({o.row, o.col, PlanarImage(4, 4, 3, 0.42)});
        }
        const TiledOutput out = blend_naive(patches, WeightMatrix(spec));
        for (double v : out.image.data()) REQUIRE(std::fabs(v - 0.42) <= 1e-12);
    }
    SUBCASE("matches the per-pixel weighted-average oracle") {
        const GridSpec spec = GridSpec::square(8, 4, 2);
        const auto patches = random_patches(rng, spec);
        const WeightMatrix w(spec);
        const TiledOutput out = blend_naive(patches, w);
        for (int c = 0; c < 3; ++c) {
            for (int x = 0; x < 8; ++x) {
                for (int y = 0; y < 8; ++y) {
                    double sum = 0.0;
                    int covering = 0;
                    for (const auto& p : patches) {
                        if (x >= p.origin_row && x < p.origin_row + 4 && y >= p.origin_col &&
                            y < p.origin_col + 4) {
                            sum += p.pixels.at(c, x - p.origin_row, y - p.origin_col);
                            ++covering;
                        }
                    }
                    REQUIRE(std::fabs(out.image.at(c, x, y) - sum / covering) <= 1e-12);
                }
            }
        }
    }
    SUBCASE("missing lattice positions are reported") {
        const GridSpec spec = GridSpec::square(8, 4, 2);
        auto patches = random_patches(rng, spec);
        patches.pop_back();
        CHECK_THROWS_WITH_AS(blend_naive(patches, WeightMatrix(spec)),
                             doctest::Contains("missing"), ContractError);
    }
}

TEST_CASE("blend_streaming") {
    std::mt19937_64 rng(79);
    SUBCASE("equals blend_naive on random instances") {
        for (int trial = 0; trial < 50; ++trial) {
            const GridSpec spec = random_square_spec(rng, 64);
            auto patches = random_patches(rng, spec);
            const TiledOutput naive = blend_naive(patches, WeightMatrix(spec));

            auto shuffled = patches;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            const TiledOutput streamed = blend_streaming(source_of(shuffled), spec);
            const TiledOutput streamed4 = blend_streaming(source_of(std::move(shuffled)), spec, 4);

            for (std::size_t i = 0; i < naive.image.data().size(); ++i) {
                REQUIRE(std::fabs(streamed.image.data()[i] - naive.image.data()[i]) <= 1e-9);
                // band split must not change the result at all for a fixed order
                REQUIRE(streamed4.image.data()[i] == streamed.image.data()[i]);
            }
        }
    }
    SUBCASE("duplicate origin rejected") {
        const GridSpec spec = GridSpec::square(8, 4, 2);
        auto patches = random_patches(rng, spec);
        patches[1] = patches[0];
        CHECK_THROWS_WITH_AS(blend_streaming(source_of(std::move(patches)), spec),
                             doctest::Contains("duplicate"), ContractError);
    }
    SUBCASE("missing origin rejected") {
        const GridSpec spec = GridSpec::square(8, 4, 2);
        auto patches = random_patches(rng, spec);
        patches.pop_back();
        CHECK_THROWS_AS(blend_streaming(source_of(std::move(patches)), spec), ContractError);
    }
    SUBCASE("identity patches at a larger scale") {
        const GridSpec spec = GridSpec::square(256, 64, 16);
        const PlanarImage img = random_image(rng, 256, 256);
        const TiledOutput out = blend_streaming(source_of(split(img, spec)), spec, 2);
        for (std::size_t i = 0; i < img.data().size(); ++i) {
            REQUIRE(std::fabs(out.image.data()[i] - img.data()[i]) <= 1e-12);
        }
    }
}
