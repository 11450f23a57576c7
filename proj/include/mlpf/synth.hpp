#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "mlpf/events.hpp"

namespace mlpf {

// One straight edge sweeping the array. orientation_deg is the direction of
// motion; the edge line is perpendicular to it. Every pixel crossing emits
// events_per_crossing events of the edge's polarity on a fixed sub-ms
// schedule, so generation is fully deterministic.
struct SceneConfig {
    SensorGeometry geometry{};
    double orientation_deg = 0.0;
    double speed_px_s = 100.0;
    std::int8_t polarity = 1;
    double duration_s = 1.0;
    int events_per_crossing = 1;
};

struct NoiseConfig {
    double rate_hz_px = 5.0;
    double duration_s = 2.0;
    std::uint64_t seed = 1;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Fixed per-pixel sub-ms jitter; breaks simultaneous-crossing ties without
// any RNG state.
inline std::int64_t pixel_jitter_us(std::int32_t x, std::int32_t y) {
    const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
                              static_cast<std::uint32_t>(y);
    return static_cast<std::int64_t>(splitmix64(key) % 199);
}

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

inline std::vector<Event> generate_signal(const SceneConfig& scene) {
    if (scene.speed_px_s <= 0 || scene.duration_s <= 0 || scene.events_per_crossing < 1)
        throw std::invalid_argument("scene config out of range");

    const double rad = scene.orientation_deg * std::acos(-1.0) / 180.0;
    const double nx = std::cos(rad);
    const double ny = std::sin(rad);

    // Projection range of the pixel grid onto the motion direction; the edge
    // starts 1 px before the first pixel it can cross.
    double s_min = std::numeric_limits<double>::max();
    for (const double cx : {0.0, static_cast<double>(scene.geometry.width - 1)})
        for (const double cy : {0.0, static_cast<double>(scene.geometry.height - 1)})
            s_min = std::min(s_min, cx * nx + cy * ny);

    const std::int64_t duration_us = static_cast<std::int64_t>(scene.duration_s * 1e6);
    std::vector<Event> events;
    for (std::int32_t y = 0; y < scene.geometry.height; ++y) {
        for (std::int32_t x = 0; x < scene.geometry.width; ++x) {
            const double s = x * nx + y * ny;
            const double t_cross_s = (s - s_min + 1.0) / scene.speed_px_s;
            const std::int64_t base_us =
                static_cast<std::int64_t>(std::llround(t_cross_s * 1e6)) +
                detail::pixel_jitter_us(x, y);
            for (int j = 0; j < scene.events_per_crossing; ++j) {
                const std::int64_t t_us = base_us + 300 * j;
                if (t_us > duration_us) break;
                Event e;
                e.t_us = t_us;
                e.x = x;
                e.y = y;
                e.polarity = scene.polarity;
                e.label = Label::signal;
                events.push_back(e);
            }
        }
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t_us < b.t_us; });
    return events;
}

inline std::vector<Event> generate_signal(std::span<const SceneConfig> scenes) {
    std::vector<Event> events;
    for (const SceneConfig& scene : scenes) {
        const auto part = generate_signal(scene);
        events.insert(events.end(), part.begin(), part.end());
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t_us < b.t_us; });
    return events;
}

// Homogeneous per-pixel Poisson shot noise, merged into the signal stream.
// Signal events pass through unchanged; ties keep signal before noise.
inline std::vector<Event> inject_noise(std::span<const Event> signal, const NoiseConfig& noise,
                                       SensorGeometry geometry) {
    if (noise.rate_hz_px < 0) throw std::invalid_argument("noise rate must be non-negative");
    std::vector<Event> merged(signal.begin(), signal.end());
    if (noise.rate_hz_px > 0) {
        std::mt19937_64 rng(noise.seed);
        for (std::int32_t y = 0; y < geometry.height; ++y) {
            for (std::int32_t x = 0; x < geometry.width; ++x) {
                double t = 0.0;
                while (true) {
                    t += -std::log1p(-detail::uniform01(rng)) / noise.rate_hz_px;
                    if (t >= noise.duration_s) break;
                    Event e;
                    e.t_us = static_cast<std::int64_t>(std::llround(t * 1e6));
                    e.x = x;
                    e.y = y;
                    e.polarity = (rng() & 1) ? std::int8_t{1} : std::int8_t{-1};
                    e.label = Label::noise;
                    merged.push_back(e);
                }
            }
        }
    }
    std::stable_sort(merged.begin(), merged.end(),
                     [](const Event& a, const Event& b) { return a.t_us < b.t_us; });
    return merged;
}

// Several fast edges of mixed orientation and polarity: the dense,
// driving-like regime.
inline std::vector<SceneConfig> dense_scene(SensorGeometry geometry, double duration_s) {
    return {
        SceneConfig{geometry, 0.0, 400.0, +1, duration_s, 2},
        SceneConfig{geometry, 90.0, 300.0, -1, duration_s, 2},
        SceneConfig{geometry, 45.0, 500.0, +1, duration_s, 1},
        SceneConfig{geometry, 135.0, 250.0, -1, duration_s, 1},
    };
}

// A single slow edge: the sparse, surveillance-like regime.
inline std::vector<SceneConfig> sparse_scene(SensorGeometry geometry, double duration_s) {
    return {SceneConfig{geometry, 0.0, 40.0, +1, duration_s, 1}};
}

}  // namespace mlpf
