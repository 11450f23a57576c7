#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mlpf/events.hpp"
#include "mlpf/qarith.hpp"

namespace mlpf {

inline constexpr int kPatchSize = 7;
inline constexpr int kPatchRadius = kPatchSize / 2;
inline constexpr int kPatchPixels = kPatchSize * kPatchSize;  // 49
inline constexpr int kFeatureCount = 2 * kPatchPixels;        // 49 ages then 49 polarities
inline constexpr int kPatchCenter = kPatchPixels / 2;         // row-major index 24

// Correlation time window: a power of two between 1 ms and 256 ms.
struct AgeWindow {
    std::int32_t tau_ms = 64;
    std::int32_t log2_tau = 6;

    static AgeWindow from_ms(std::int32_t tau_ms) {
        if (tau_ms < 1 || tau_ms > 256 || (tau_ms & (tau_ms - 1)) != 0)
            throw std::invalid_argument("age window must be a power of two in [1, 256] ms");
        std::int32_t log2 = 0;
        while ((1 << log2) < tau_ms) ++log2;
        return AgeWindow{tau_ms, log2};
    }
};

// Age in sixteenths before the 4-bit saturation: 16 - (delta >> (log2(tau)-4)),
// floored at 0. Equals round-free shift arithmetic, so the value is exact.
inline int age_sixteenths(std::int64_t delta_ms, AgeWindow tau) {
    if (delta_ms < 0 || delta_ms >= tau.tau_ms) return 0;
    const int shift = tau.log2_tau - 4;
    const std::int64_t scaled = shift >= 0 ? (delta_ms >> shift) : (delta_ms << -shift);
    return static_cast<int>(16 - scaled);  // delta < tau guarantees [1, 16]
}

// 4-bit age code; decays from 15 at delta 0 down to 0 at delta >= tau.
inline QValue quantized_age(std::int64_t delta_ms, AgeWindow tau) {
    const int sixteenths = age_sixteenths(delta_ms, tau);
    return QValue{std::min(sixteenths, 15), kInputFormat4};
}

struct TpiPixel {
    std::uint16_t t_ms = 0;
    std::int8_t polarity = 0;
    bool valid = false;
};

// Per-pixel store of the most recent event's wrapped ms timestamp and
// polarity. Single-writer sequential state; copyable for snapshots.
class TpiMemory {
  public:
    explicit TpiMemory(SensorGeometry geometry)
        : geometry_(geometry), pixels_(static_cast<std::size_t>(geometry.pixel_count())) {}

    const SensorGeometry& geometry() const { return geometry_; }

    const TpiPixel& at(std::int32_t x, std::int32_t y) const {
        return pixels_[static_cast<std::size_t>(y) * geometry_.width + x];
    }

    void update(const Event& e) {
        if (!geometry_.contains(e.x, e.y))
            throw std::out_of_range("TPI update outside sensor bounds");
        TpiPixel& px = pixels_[static_cast<std::size_t>(e.y) * geometry_.width + e.x];
        px.t_ms = wrap16(ms_timestamp(e.t_us));
        px.polarity = e.polarity;
        px.valid = true;
    }

  private:
    SensorGeometry geometry_;
    std::vector<TpiPixel> pixels_;
};

// 98 quantized activations: 49 ages then 49 polarities, patch scanned
// row-major top-left to bottom-right.
struct InputVector {
    QFormat format = kInputFormat4;
    std::array<std::int16_t, kFeatureCount> codes{};

    QValue age(int i) const { return QValue{codes[i], format}; }
    QValue polarity(int i) const { return QValue{codes[kPatchPixels + i], format}; }
};

// Pre-quantizer features in sixteenths: ages in [0, 16], polarities in
// {-16, 0, +16}. Dividing by 16 gives the real-valued trainer input; feeding
// that through the input quantizer reproduces the integer codes exactly.
inline std::array<std::int8_t, kFeatureCount> extract_feature_sixteenths(const TpiMemory& tpi,
                                                                         const Event& e,
                                                                         AgeWindow tau) {
    std::array<std::int8_t, kFeatureCount> feat{};
    const std::uint16_t now_ms = wrap16(ms_timestamp(e.t_us));
    const SensorGeometry& geo = tpi.geometry();
    int idx = 0;
    for (int dy = -kPatchRadius; dy <= kPatchRadius; ++dy) {
        for (int dx = -kPatchRadius; dx <= kPatchRadius; ++dx, ++idx) {
            const std::int32_t px = e.x + dx;
            const std::int32_t py = e.y + dy;
            if (!geo.contains(px, py)) continue;  // zero-fill outside the array
            const TpiPixel& cell = tpi.at(px, py);
            if (!cell.valid) continue;
            const std::uint16_t delta = static_cast<std::uint16_t>(now_ms - cell.t_ms);
            const int age = age_sixteenths(delta, tau);
            feat[idx] = static_cast<std::int8_t>(age);
            if (age > 0)  // stale polarities are zeroed along with their age
                feat[kPatchPixels + idx] = static_cast<std::int8_t>(cell.polarity * 16);
        }
    }
    // The center polarity is the classified event's own polarity.
    feat[kPatchPixels + kPatchCenter] = static_cast<std::int8_t>(e.polarity * 16);
    return feat;
}

inline std::array<double, kFeatureCount> extract_features_real(const TpiMemory& tpi, const Event& e,
                                                               AgeWindow tau) {
    const auto sixteenths = extract_feature_sixteenths(tpi, e, tau);
    std::array<double, kFeatureCount> feat{};
    for (int i = 0; i < kFeatureCount; ++i) feat[i] = sixteenths[i] / 16.0;
    return feat;
}

// Quantized activation vector for one event. Must be called before the TPI
// is updated with that event.
inline InputVector extract_features(const TpiMemory& tpi, const Event& e, AgeWindow tau,
                                    QFormat input_format = kInputFormat4) {
    const auto real = extract_features_real(tpi, e, tau);
    InputVector v;
    v.format = input_format;
    for (int i = 0; i < kFeatureCount; ++i)
        v.codes[i] = static_cast<std::int16_t>(quantize(real[i], input_format).code);
    return v;
}

}  // namespace mlpf
