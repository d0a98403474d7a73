#include "vmstain/colorspace.hpp"
#include "vmstain/errors.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace vmstain;
using vmstain::testing::random_image;
using vmstain::testing::reference_rgb_to_hsv;

TEST_CASE("rgb_to_hsv corner cases") {
    SUBCASE("pure red") {
        const HsvPixel h = rgb_to_hsv({1.0, 0.0, 0.0});
        CHECK(h.h == doctest::Approx(0.0));
        CHECK(h.s == doctest::Approx(1.0));
        CHECK(h.v == doctest::Approx(1.0));
    }
    SUBCASE("gray has canonical zeros") {
        const HsvPixel h = rgb_to_hsv({0.5, 0.5, 0.5});
        CHECK(h.h == 0.0);
        CHECK(h.s == 0.0);
        CHECK(h.v == doctest::Approx(0.5));
    }
    SUBCASE("black") {
        const HsvPixel h = rgb_to_hsv({0.0, 0.0, 0.0});
        CHECK(h.h == 0.0);
        CHECK(h.s == 0.0);
        CHECK(h.v == 0.0);
    }
    SUBCASE("green-max branch") {
        // Frozen from the reference conversion: (0.2, 0.6, 0.4).
        const HsvPixel h = rgb_to_hsv({0.2, 0.6, 0.4});
        CHECK(h.h == doctest::Approx(150.0).epsilon(1e-12));
        CHECK(h.s == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(h.v == doctest::Approx(0.6).epsilon(1e-12));
    }
    SUBCASE("red-max negative branch wraps by 360") {
        // b > g with r max forces the negative case.
        const HsvPixel h = rgb_to_hsv({0.8, 0.1, 0.4});
        CHECK(h.h > 300.0);
        CHECK(h.h < 360.0);
        const HsvPixel ref = reference_rgb_to_hsv(0.8, 0.1, 0.4);
        CHECK(h.h == doctest::Approx(ref.h).epsilon(1e-12));
    }
}

TEST_CASE("rgb_to_hsv rejects invalid input") {
    CHECK_THROWS_AS(rgb_to_hsv({-0.1, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(rgb_to_hsv({0.0, 1.5, 0.0}), DomainError);
    CHECK_THROWS_AS(rgb_to_hsv({0.0, 0.0, std::nan("")}), DomainError);
}

TEST_CASE("hsv_to_rgb corner cases") {
    SUBCASE("pure red") {
        const RgbPixel p = hsv_to_rgb({0.0, 1.0, 1.0});
        CHECK(p.r == doctest::Approx(1.0));
        CHECK(p.g == doctest::Approx(0.0));
        CHECK(p.b == doctest::Approx(0.0));
    }
    SUBCASE("zero saturation is gray") {
        const RgbPixel p = hsv_to_rgb({0.0, 0.0, 0.5});
        CHECK(p.r == doctest::Approx(0.5));
        CHECK(p.g == doctest::Approx(0.5));
        CHECK(p.b == doctest::Approx(0.5));
    }
    SUBCASE("inverse of the green-max example") {
        const RgbPixel p = hsv_to_rgb({150.0, 2.0 / 3.0, 0.6});
        CHECK(p.r == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(p.g == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(p.b == doctest::Approx(0.4).epsilon(1e-12));
    }
    SUBCASE("rejects out-of-range input") {
        CHECK_THROWS_AS(hsv_to_rgb({360.0, 0.5, 0.5}), DomainError);
        CHECK_THROWS_AS(hsv_to_rgb({-1.0, 0.5, 0.5}), DomainError);
        CHECK_THROWS_AS(hsv_to_rgb({0.0, 1.1, 0.5}), DomainError);
        CHECK_THROWS_AS(hsv_to_rgb({0.0, 0.5, 1.1}), DomainError);
    }
}

TEST_CASE("rgb_to_hsv matches the reference conversion on random pixels") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
        const double r = dist(rng), g = dist(rng), b = dist(rng);
        const HsvPixel got = rgb_to_hsv({r, g, b});
        const HsvPixel ref = reference_rgb_to_hsv(r, g, b);
        CHECK(got.h == doctest::Approx(ref.h).epsilon(1e-9));
        CHECK(got.s == doctest::Approx(ref.s).epsilon(1e-9));
        CHECK(got.v == doctest::Approx(ref.v).epsilon(1e-9));
    }
}

TEST_CASE("round trip property over random pixels") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < 100000; ++i) {
        const RgbPixel in{dist(rng), dist(rng), dist(rng)};
        const HsvPixel hsv = rgb_to_hsv(in);
        REQUIRE(hsv.h >= 0.0);
        REQUIRE(hsv.h < 360.0);
        REQUIRE(hsv.s >= 0.0);
        REQUIRE(hsv.s <= 1.0);
        REQUIRE(hsv.v >= 0.0);
        REQUIRE(hsv.v <= 1.0);
        const RgbPixel out = hsv_to_rgb(hsv);
        REQUIRE(std::fabs(out.r - in.r) <= 1e-6);
        REQUIRE(std::fabs(out.g - in.g) <= 1e-6);
        REQUIRE(std::fabs(out.b - in.b) <= 1e-6);
    }
}

TEST_CASE("scaling all channels scales V and fixes H") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.05, 1.0);
    for (int i = 0; i < 5000; ++i) {
        const double r = dist(rng), g = dist(rng), b = dist(rng);
        const double c = scale(rng);
        const HsvPixel base = rgb_to_hsv({r, g, b});
        const HsvPixel scaled = rgb_to_hsv({c * r, c * g, c * b});
        REQUIRE(scaled.v == doctest::Approx(c * base.v).epsilon(1e-9));
        if (base.s > 1e-9 && scaled.s > 1e-9) {
            REQUIRE(std::fabs(scaled.h - base.h) <= 1e-6);
        }
    }
}

TEST_CASE("value_channel equals the per-pixel max oracle") {
    std::mt19937_64 rng(17);
    const PlanarImage img = random_image(rng, 9, 13);
    const PlanarImage v = value_channel(img);
    REQUIRE(v.channels() == 1);
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            double expect = img.at(0, r, c);
            for (int ch = 1; ch < 3; ++ch) expect = std::max(expect, img.at(ch, r, c));
            REQUIRE(v.at(0, r, c) == expect);
        }
    }

    SUBCASE("named pixels") {
        PlanarImage two(1, 2, 3);
        two.at(0, 0, 0) = 0.2; two.at(1, 0, 0) = 0.5; two.at(2, 0, 0) = 0.1;
        two.at(0, 0, 1) = 0.3; two.at(1, 0, 1) = 0.3; two.at(2, 0, 1) = 0.9;
        const PlanarImage vv = value_channel(two);
        CHECK(vv.at(0, 0, 0) == 0.5);
        CHECK(vv.at(0, 0, 1) == 0.9);
    }
    SUBCASE("all black") {
        const PlanarImage black(4, 4, 3);
        const PlanarImage v = value_channel(black);
        for (double x : v.data()) CHECK(x == 0.0);
    }
}
