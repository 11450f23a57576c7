#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "mlpf/denoiser.hpp"

namespace mlpf {

// Background activity filter: an event is signal iff any pixel in the
// (2r+1)^2 - 1 neighborhood fired within tau_us. Polarity-agnostic.
struct BafConfig {
    SensorGeometry geometry{};
    std::int64_t tau_us = 1000;
    int radius = 1;
};

// The emitted score is the negated age of the most recent neighbor, so a
// threshold sweep over scores reproduces sweeping tau_us.
inline std::vector<Decision> baf_denoise(std::span<const Event> events, const BafConfig& cfg) {
    if (cfg.tau_us <= 0 || cfg.radius < 1) throw std::invalid_argument("bad BAF config");

    // "never fired" is far enough in the past that no window can reach it
    constexpr std::int64_t kNever = -(std::int64_t{1} << 62);
    std::vector<std::int64_t> last(static_cast<std::size_t>(cfg.geometry.pixel_count()), kNever);

    std::vector<Decision> decisions;
    decisions.reserve(events.size());
    for (const Event& e : events) {
        if (!cfg.geometry.contains(e.x, e.y))
            throw std::out_of_range("BAF event outside sensor bounds");

        std::int64_t min_delta = std::numeric_limits<std::int64_t>::max();
        for (std::int32_t dy = -cfg.radius; dy <= cfg.radius; ++dy) {
            for (std::int32_t dx = -cfg.radius; dx <= cfg.radius; ++dx) {
                if (dx == 0 && dy == 0) continue;  // self-pixel excluded
                const std::int32_t nx = e.x + dx;
                const std::int32_t ny = e.y + dy;
                if (!cfg.geometry.contains(nx, ny)) continue;
                const std::int64_t t_last =
                    last[static_cast<std::size_t>(ny) * cfg.geometry.width + nx];
                min_delta = std::min(min_delta, e.t_us - t_last);
            }
        }

        Decision d;
        d.event = e;
        d.predicted = min_delta <= cfg.tau_us ? Label::signal : Label::noise;
        d.score = -min_delta;
        decisions.push_back(d);

        // memory is updated only after the check
        last[static_cast<std::size_t>(e.y) * cfg.geometry.width + e.x] = e.t_us;
    }
    return decisions;
}

}  // namespace mlpf
