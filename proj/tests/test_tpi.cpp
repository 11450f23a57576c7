#include <catch2/catch_amalgamated.hpp>

#include "mlpf/tpi.hpp"

using namespace mlpf;

namespace {

Event make_event(std::int64_t t_us, std::int32_t x, std::int32_t y, int polarity) {
    Event e;
    e.t_us = t_us;
    e.x = x;
    e.y = y;
    e.polarity = static_cast<std::int8_t>(polarity);
    return e;
}

// row-major patch index for an offset from the center
int patch_index(int dx, int dy) { return (dy + kPatchRadius) * kPatchSize + (dx + kPatchRadius); }

}  // namespace

TEST_CASE("quantized_age examples at tau = 64 ms", "[tpi]") {
    const AgeWindow tau = AgeWindow::from_ms(64);
    CHECK(quantized_age(0, tau).code == 15);
    CHECK(quantized_age(0, tau).value() == Catch::Approx(0.9375));
    CHECK(quantized_age(64, tau).code == 0);
    CHECK(quantized_age(33, tau).code == 8);  // 33>>2 = 8; 16-8 = 8
    CHECK(quantized_age(33, tau).value() == Catch::Approx(0.5));
}

TEST_CASE("AgeWindow validates its range", "[tpi]") {
    CHECK(AgeWindow::from_ms(1).log2_tau == 0);
    CHECK(AgeWindow::from_ms(256).log2_tau == 8);
    CHECK_THROWS_AS(AgeWindow::from_ms(0), std::invalid_argument);
    CHECK_THROWS_AS(AgeWindow::from_ms(3), std::invalid_argument);
    CHECK_THROWS_AS(AgeWindow::from_ms(512), std::invalid_argument);
}

TEST_CASE("quantized_age is monotone non-increasing in delta", "[tpi]") {
    for (int log2 = 0; log2 <= 8; ++log2) {
        const AgeWindow tau = AgeWindow::from_ms(1 << log2);
        int prev = 16;
        for (std::int64_t delta = 0; delta <= 2 * tau.tau_ms; ++delta) {
            const int code = quantized_age(delta, tau).code;
            REQUIRE(code <= prev);
            prev = code;
        }
    }
}

TEST_CASE("quantized_age tracks the ideal decay within two steps", "[tpi]") {
    for (int log2 = 0; log2 <= 8; ++log2) {
        const AgeWindow tau = AgeWindow::from_ms(1 << log2);
        for (std::int64_t delta = 0; delta <= 2 * tau.tau_ms; ++delta) {
            const double ideal = std::max(0.0, 1.0 - static_cast<double>(delta) / tau.tau_ms);
            const double got = quantized_age(delta, tau).value();
            REQUIRE(std::abs(got - ideal) <= 2.0 / 16.0 + 1e-12);
        }
    }
}

TEST_CASE("extract_features: fresh memory leaves only the center polarity", "[tpi]") {
    const SensorGeometry geo{64, 48};
    const AgeWindow tau = AgeWindow::from_ms(64);
    TpiMemory tpi(geo);

    const InputVector v = extract_features(tpi, make_event(5000, 20, 10, +1), tau);
    for (int i = 0; i < kPatchPixels; ++i) REQUIRE(v.codes[i] == 0);
    for (int i = 0; i < kPatchPixels; ++i) {
        if (i == kPatchCenter) continue;
        REQUIRE(v.codes[kPatchPixels + i] == 0);
    }
    CHECK(v.polarity(kPatchCenter).code == 15);  // +1 saturates to 15/16

    const InputVector v_off = extract_features(tpi, make_event(5000, 20, 10, -1), tau);
    CHECK(v_off.polarity(kPatchCenter).code == -16);  // -1 is exact
}

TEST_CASE("extract_features: single 10 ms old neighbor", "[tpi]") {
    const SensorGeometry geo{64, 48};
    const AgeWindow tau = AgeWindow::from_ms(64);
    TpiMemory tpi(geo);

    // Prior OFF event at (x-1, y), 10 ms (in ms-timestamp units) earlier.
    tpi.update(make_event(0, 19, 10, -1));
    const InputVector v = extract_features(tpi, make_event(10 * 1024, 20, 10, +1), tau);

    const int neighbor = patch_index(-1, 0);
    for (int i = 0; i < kPatchPixels; ++i) {
        if (i == neighbor)
            REQUIRE(v.codes[i] == 14);  // 16 - (10>>2)
        else
            REQUIRE(v.codes[i] == 0);
    }
    CHECK(v.polarity(neighbor).code == -16);
    CHECK(v.polarity(kPatchCenter).code == 15);
    for (int i = 0; i < kPatchPixels; ++i) {
        if (i == neighbor || i == kPatchCenter) continue;
        REQUIRE(v.codes[kPatchPixels + i] == 0);
    }
}

TEST_CASE("extract_features: corner patch zero-fills cells outside the array", "[tpi]") {
    const SensorGeometry geo{64, 48};
    const AgeWindow tau = AgeWindow::from_ms(64);
    TpiMemory tpi(geo);

    // Make every real pixel fresh so only out-of-bounds cells read as zero.
    for (std::int32_t y = 0; y < geo.height; ++y)
        for (std::int32_t x = 0; x < geo.width; ++x) tpi.update(make_event(1024, x, y, +1));

    const InputVector v = extract_features(tpi, make_event(2048, 0, 0, +1), tau);
    int zero_ages = 0;
    for (int i = 0; i < kPatchPixels; ++i) zero_ages += v.codes[i] == 0;
    // A 7x7 patch centered on the corner keeps a 4x4 block inside the array.
    CHECK(zero_ages == kPatchPixels - 16);
    CHECK(v.codes[patch_index(0, 0)] > 0);
    CHECK(v.codes[patch_index(3, 3)] > 0);
    CHECK(v.codes[patch_index(-1, 0)] == 0);
    CHECK(v.codes[patch_index(0, -1)] == 0);
}

TEST_CASE("extract_features ignores events outside the 7x7 patch", "[tpi]") {
    const SensorGeometry geo{64, 48};
    const AgeWindow tau = AgeWindow::from_ms(64);
    const Event probe = make_event(8 * 1024, 20, 10, +1);

    TpiMemory quiet(geo);
    quiet.update(make_event(0, 23, 10, -1));  // dx = +3, inside
    const InputVector before = extract_features(quiet, probe, tau);

    TpiMemory noisy = quiet;
    noisy.update(make_event(0, 30, 10, -1));  // dx = +10, outside
    noisy.update(make_event(0, 20, 20, +1));  // dy = +10, outside
    const InputVector after = extract_features(noisy, probe, tau);

    CHECK(before.codes == after.codes);
}

TEST_CASE("extract-before-update: the event's own write is not visible", "[tpi]") {
    const SensorGeometry geo{64, 48};
    const AgeWindow tau = AgeWindow::from_ms(64);
    TpiMemory tpi(geo);

    const Event e = make_event(4096, 20, 10, +1);
    const InputVector v = extract_features(tpi, e, tau);
    CHECK(v.age(kPatchCenter).code == 0);  // no self-age on a fresh memory
    tpi.update(e);

    // A later event at the same pixel now sees the stored one at the center.
    const InputVector v2 = extract_features(tpi, make_event(4096 + 2048, 20, 10, -1), tau);
    CHECK(v2.age(kPatchCenter).code == 15);  // delta 2 ms, 2>>2 = 0
}

TEST_CASE("update stores wrapped millisecond timestamps", "[tpi]") {
    const SensorGeometry geo{64, 48};
    TpiMemory tpi(geo);

    tpi.update(make_event(5 * 1024, 3, 4, -1));
    CHECK(tpi.at(3, 4).t_ms == 5);
    CHECK(tpi.at(3, 4).polarity == -1);
    CHECK(tpi.at(3, 4).valid);

    tpi.update(make_event(9 * 1024, 3, 4, +1));  // last writer wins
    CHECK(tpi.at(3, 4).t_ms == 9);
    CHECK(tpi.at(3, 4).polarity == 1);

    tpi.update(make_event(67108864, 3, 4, +1));  // 65536 ms wraps to 0
    CHECK(tpi.at(3, 4).t_ms == 0);

    CHECK_THROWS_AS(tpi.update(make_event(0, 64, 0, +1)), std::out_of_range);
}
