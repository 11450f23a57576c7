#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "mlpf/denoiser.hpp"
#include "mlpf/synth.hpp"
#include "oracles.hpp"

using namespace mlpf;

namespace {

MlpfWeights small_random_weights(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> code(-4, 4);
    MlpfWeights w;
    for (auto& row : w.w1)
        for (auto& c : row) c = static_cast<std::int16_t>(code(rng));
    for (auto& c : w.b1) c = static_cast<std::int16_t>(code(rng));
    for (auto& c : w.w2) c = static_cast<std::int16_t>(code(rng));
    w.b2 = static_cast<std::int16_t>(code(rng));
    return w;
}

std::vector<Event> noisy_stream(SensorGeometry geo, double duration_s, std::uint64_t seed) {
    SceneConfig scene;
    scene.geometry = geo;
    scene.speed_px_s = 150.0;
    scene.duration_s = duration_s;
    NoiseConfig noise;
    noise.rate_hz_px = 20.0;
    noise.duration_s = duration_s;
    noise.seed = seed;
    return inject_noise(generate_signal(scene), noise, geo);
}

}  // namespace

TEST_CASE("denoise_stream: empty stream yields no decisions", "[denoiser]") {
    DenoiseConfig cfg;
    cfg.geometry = {32, 32};
    cfg.tau = AgeWindow::from_ms(64);
    CHECK(denoise_stream({}, cfg).empty());
}

TEST_CASE("denoise_stream: a lone event is decided by the canonical lone vector", "[denoiser]") {
    DenoiseConfig cfg;
    cfg.geometry = {32, 32};
    cfg.tau = AgeWindow::from_ms(64);
    cfg.weights = small_random_weights(301);
    cfg.threshold = Threshold{0};

    Event e;
    e.t_us = 777;
    e.x = 16;
    e.y = 16;
    e.polarity = 1;
    const std::vector<Event> events{e};
    const auto decisions = denoise_stream(events, cfg);
    REQUIRE(decisions.size() == 1);

    // all-zero features except the center polarity slot
    InputVector lone;
    lone.codes[kPatchPixels + kPatchCenter] = 15;
    const auto expected = oracles::oracle_infer(cfg.weights, lone);
    CHECK(decisions[0].score == expected.logit_code);
    CHECK(decisions[0].predicted ==
          (expected.logit_code >= 0 ? Label::signal : Label::noise));
}

TEST_CASE("denoise_stream is deterministic", "[denoiser]") {
    DenoiseConfig cfg;
    cfg.geometry = {40, 30};
    cfg.tau = AgeWindow::from_ms(32);
    cfg.weights = small_random_weights(302);
    const auto events = noisy_stream(cfg.geometry, 0.3, 11);

    const auto a = denoise_stream(events, cfg);
    const auto b = denoise_stream(events, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].score == b[i].score);
        REQUIRE(a[i].predicted == b[i].predicted);
    }
}

TEST_CASE("raising the threshold never turns noise into signal", "[denoiser]") {
    DenoiseConfig low;
    low.geometry = {40, 30};
    low.tau = AgeWindow::from_ms(64);
    low.weights = small_random_weights(303);
    low.threshold = Threshold{-50};
    DenoiseConfig high = low;
    high.threshold = Threshold{+50};

    const auto events = noisy_stream(low.geometry, 0.3, 12);
    const auto d_low = denoise_stream(events, low);
    const auto d_high = denoise_stream(events, high);
    REQUIRE(d_low.size() == d_high.size());
    for (std::size_t i = 0; i < d_low.size(); ++i) {
        REQUIRE(d_low[i].score == d_high[i].score);  // scores ignore the threshold
        if (d_high[i].predicted == Label::signal)
            REQUIRE(d_low[i].predicted == Label::signal);
    }
}

TEST_CASE("decisions are causal: prefixes decide identically", "[denoiser]") {
    DenoiseConfig cfg;
    cfg.geometry = {40, 30};
    cfg.tau = AgeWindow::from_ms(64);
    cfg.weights = small_random_weights(304);

    const auto events = noisy_stream(cfg.geometry, 0.2, 13);
    const auto full = denoise_stream(events, cfg);

    const std::size_t cut = events.size() / 2;
    const auto prefix =
        denoise_stream(std::span<const Event>(events.data(), cut), cfg);
    REQUIRE(prefix.size() == cut);
    for (std::size_t i = 0; i < cut; ++i) {
        REQUIRE(prefix[i].score == full[i].score);
        REQUIRE(prefix[i].predicted == full[i].predicted);
    }
}

TEST_CASE("decision CSV round-trips scores and labels", "[denoiser]") {
    DenoiseConfig cfg;
    cfg.geometry = {40, 30};
    cfg.tau = AgeWindow::from_ms(64);
    cfg.weights = small_random_weights(305);
    const auto events = noisy_stream(cfg.geometry, 0.1, 14);
    const auto decisions = denoise_stream(events, cfg);

    std::ostringstream out;
    write_decisions(out, decisions, true, true);
    std::istringstream in(out.str());
    const ScoredLabels scored = read_scored_decisions(in);

    REQUIRE(scored.scores.size() == decisions.size());
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        REQUIRE(scored.scores[i] == static_cast<double>(decisions[i].score));
        REQUIRE(scored.labels[i] == decisions[i].event.label);
    }
}

TEST_CASE("decision CSV without required columns is rejected for eval", "[denoiser]") {
    std::istringstream in("t_us,x,y,p,pred\n1,2,3,1,1\n");
    CHECK_THROWS_AS(read_scored_decisions(in), ParseError);
}

TEST_CASE("float scoring path matches the stream replay order", "[denoiser]") {
    const SensorGeometry geo{40, 30};
    const auto events = noisy_stream(geo, 0.1, 15);

    RealWeights w;
    w.b2 = 0.25;
    const auto scores = denoise_scores_float(events, geo, AgeWindow::from_ms(64), w);
    REQUIRE(scores.size() == events.size());
    for (const double s : scores) REQUIRE(s == Catch::Approx(sigmoid(0.25)));
}
