#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace mlpf {

// Fixed-point format: optional sign bit, integer_bits integer bits and
// fraction_bits fractional bits. A code c represents the value
// c * 2^-fraction_bits. Signed formats span [-2^(i+f), 2^(i+f)-1] in code
// space, so a pure-fraction signed format covers [-1, 1-2^-f].
struct QFormat {
    std::uint8_t fraction_bits = 4;
    std::uint8_t integer_bits = 0;
    bool is_signed = true;

    constexpr int total_bits() const {
        return (is_signed ? 1 : 0) + integer_bits + fraction_bits;
    }
    constexpr std::int32_t code_max() const {
        return static_cast<std::int32_t>((std::int64_t{1} << (integer_bits + fraction_bits)) - 1);
    }
    constexpr std::int32_t code_min() const {
        return is_signed ? static_cast<std::int32_t>(-(std::int64_t{1} << (integer_bits + fraction_bits)))
                         : 0;
    }
    constexpr double step() const {
        return 1.0 / static_cast<double>(std::int64_t{1} << fraction_bits);
    }
    friend constexpr bool operator==(QFormat, QFormat) = default;
};

inline QFormat signed_fraction_format(int fraction_bits, int integer_bits = 0) {
    if (fraction_bits < 1 || integer_bits < 0 || 1 + integer_bits + fraction_bits > 32)
        throw std::invalid_argument("QFormat: bit budget out of range");
    return QFormat{static_cast<std::uint8_t>(fraction_bits),
                   static_cast<std::uint8_t>(integer_bits), true};
}

inline QFormat unsigned_fraction_format(int fraction_bits, int integer_bits = 0) {
    if (fraction_bits < 1 || integer_bits < 0 || integer_bits + fraction_bits > 32)
        throw std::invalid_argument("QFormat: bit budget out of range");
    return QFormat{static_cast<std::uint8_t>(fraction_bits),
                   static_cast<std::uint8_t>(integer_bits), false};
}

// 4 fraction bits + sign: the weight/input format (step 1/16, range [-1, 15/16]).
inline constexpr QFormat kWeightFormat4{4, 0, true};
inline constexpr QFormat kInputFormat4{4, 0, true};
// Unsigned 4-bit fraction: hidden-unit activations after the ReLU quantizer.
inline constexpr QFormat kHiddenFormat4{4, 0, false};
// Signed 16-bit accumulator with 6 integer and 9 fraction bits.
inline constexpr QFormat kAccumulatorFormat{9, 6, true};

struct QValue {
    std::int32_t code = 0;
    QFormat format{};

    constexpr double value() const { return static_cast<double>(code) * format.step(); }
    friend constexpr bool operator==(QValue, QValue) = default;
};

// Rescale a code by dropping (or, for negative drop, adding) fraction bits.
// Dropped bits round half away from zero, matching quantize().
inline std::int64_t requantize_code(std::int64_t code, int drop_bits) {
    if (drop_bits <= 0) return code << -drop_bits;
    const std::int64_t half = std::int64_t{1} << (drop_bits - 1);
    if (code >= 0) return (code + half) >> drop_bits;
    return -((-code + half) >> drop_bits);
}

inline std::int64_t align_code(std::int64_t code, int from_fraction_bits, int to_fraction_bits) {
    return requantize_code(code, from_fraction_bits - to_fraction_bits);
}

// Round to the nearest representable value, ties away from zero, saturating
// at the format's code range.
inline QValue quantize(double x, QFormat fmt) {
    if (std::isnan(x)) return QValue{0, fmt};
    const double scaled = x * static_cast<double>(std::int64_t{1} << fmt.fraction_bits);
    std::int64_t code;
    if (scaled >= static_cast<double>(fmt.code_max()))
        code = fmt.code_max();
    else if (scaled <= static_cast<double>(fmt.code_min()))
        code = fmt.code_min();
    else
        code = std::llround(scaled);
    return QValue{static_cast<std::int32_t>(code), fmt};
}

// ReLU followed by quantization into an unsigned fraction format.
inline QValue quantized_relu(double x, QFormat fmt = kHiddenFormat4) {
    if (!(x > 0.0)) return QValue{0, fmt};
    return quantize(x, fmt);
}

// Integer-only path: requantizes a fixed-point code (e.g. an accumulator)
// into the unsigned activation format. Bit-exact with the real-valued
// overload for any representable input.
inline QValue quantized_relu(QValue x, QFormat fmt = kHiddenFormat4) {
    if (x.code <= 0) return QValue{0, fmt};
    const std::int64_t code = requantize_code(x.code, x.format.fraction_bits - fmt.fraction_bits);
    return QValue{static_cast<std::int32_t>(std::min<std::int64_t>(code, fmt.code_max())), fmt};
}

struct SaturationCount {
    std::uint64_t events = 0;
};

// Saturating accumulate. addend_code must already be aligned to the
// accumulator's fraction bits (see align_code). Saturation clamps and is
// counted, never raised.
inline QValue acc_add(QValue acc, std::int64_t addend_code, SaturationCount* sat = nullptr) {
    std::int64_t sum = static_cast<std::int64_t>(acc.code) + addend_code;
    if (sum > acc.format.code_max()) {
        sum = acc.format.code_max();
        if (sat) ++sat->events;
    } else if (sum < acc.format.code_min()) {
        sum = acc.format.code_min();
        if (sat) ++sat->events;
    }
    return QValue{static_cast<std::int32_t>(sum), acc.format};
}

// Product of two quantized values, aligned to the accumulator scale.
inline std::int64_t product_code(QValue a, QValue b, QFormat acc_fmt = kAccumulatorFormat) {
    return align_code(static_cast<std::int64_t>(a.code) * b.code,
                      a.format.fraction_bits + b.format.fraction_bits, acc_fmt.fraction_bits);
}

}  // namespace mlpf
