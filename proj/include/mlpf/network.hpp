#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>

#include "mlpf/qarith.hpp"
#include "mlpf/tpi.hpp"

namespace mlpf {

inline constexpr int kInputUnits = kFeatureCount;  // 98
inline constexpr int kHiddenUnits = 10;
inline constexpr int kParameterCount =
    kInputUnits * kHiddenUnits + kHiddenUnits + kHiddenUnits + 1;  // 1001
inline constexpr char kCanonicalLayout[] = "ages49-pol49-rowmajor";

struct WeightMeta {
    QFormat weight_format = kWeightFormat4;
    QFormat input_format = kInputFormat4;
    QFormat hidden_format = kHiddenFormat4;
    QFormat acc_format = kAccumulatorFormat;
    std::string layout = kCanonicalLayout;
};

struct WeightFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integer weight codes for the 98-10-1 network, 1001 parameters total.
struct MlpfWeights {
    std::array<std::array<std::int16_t, kHiddenUnits>, kInputUnits> w1{};
    std::array<std::int16_t, kHiddenUnits> b1{};
    std::array<std::int16_t, kHiddenUnits> w2{};
    std::int16_t b2 = 0;
    WeightMeta meta;

    void validate() const {
        const auto check = [&](std::int32_t code) {
            if (code < meta.weight_format.code_min() || code > meta.weight_format.code_max())
                throw WeightFileError("weight code " + std::to_string(code) +
                                      " outside format range");
        };
        for (const auto& row : w1)
            for (std::int16_t c : row) check(c);
        for (std::int16_t c : b1) check(c);
        for (std::int16_t c : w2) check(c);
        check(b2);
    }
};

// Threshold on the logit, in the same fixed-point format; compared as a
// plain integer.
struct Threshold {
    std::int16_t code = 0;
};

using Logit = QValue;

// Bit-exact quantized forward pass. Products are computed in integer code
// space, aligned to the accumulator scale and accumulated in index order
// with per-add saturation; the bias is added last.
inline Logit infer_quantized(const MlpfWeights& w, const InputVector& x,
                             SaturationCount* sat = nullptr) {
    if (x.format != w.meta.input_format)
        throw std::invalid_argument("input format does not match weight metadata");

    const QFormat acc_fmt = w.meta.acc_format;
    const int prod_drop =
        x.format.fraction_bits + w.meta.weight_format.fraction_bits - acc_fmt.fraction_bits;
    const int bias_drop = w.meta.weight_format.fraction_bits - acc_fmt.fraction_bits;
    const int hidden_prod_drop =
        w.meta.hidden_format.fraction_bits + w.meta.weight_format.fraction_bits -
        acc_fmt.fraction_bits;

    std::array<std::int32_t, kHiddenUnits> hidden{};
    for (int j = 0; j < kHiddenUnits; ++j) {
        QValue acc{0, acc_fmt};
        for (int i = 0; i < kInputUnits; ++i) {
            const std::int64_t prod = static_cast<std::int64_t>(x.codes[i]) * w.w1[i][j];
            acc = acc_add(acc, requantize_code(prod, prod_drop), sat);
        }
        acc = acc_add(acc, requantize_code(w.b1[j], bias_drop), sat);
        hidden[j] = quantized_relu(acc, w.meta.hidden_format).code;
    }

    QValue out{0, acc_fmt};
    for (int j = 0; j < kHiddenUnits; ++j) {
        const std::int64_t prod = static_cast<std::int64_t>(hidden[j]) * w.w2[j];
        out = acc_add(out, requantize_code(prod, hidden_prod_drop), sat);
    }
    out = acc_add(out, requantize_code(w.b2, bias_drop), sat);
    return out;
}

// Real-valued weights: the training-time shadow parameters and the
// floating-point comparison baseline.
struct RealWeights {
    std::array<std::array<double, kHiddenUnits>, kInputUnits> w1{};
    std::array<double, kHiddenUnits> b1{};
    std::array<double, kHiddenUnits> w2{};
    double b2 = 0.0;
};

inline double float_logit(const RealWeights& w, const std::array<double, kInputUnits>& x) {
    double out = w.b2;
    for (int j = 0; j < kHiddenUnits; ++j) {
        double pre = w.b1[j];
        for (int i = 0; i < kInputUnits; ++i) pre += x[i] * w.w1[i][j];
        if (pre > 0.0) out += pre * w.w2[j];
    }
    return out;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Dense -> ReLU -> dense -> sigmoid in real arithmetic.
inline double infer_float(const RealWeights& w, const std::array<double, kInputUnits>& x) {
    return sigmoid(float_logit(w, x));
}

inline Label classify(Logit logit, Threshold thr) {
    return logit.code >= thr.code ? Label::signal : Label::noise;
}

// Zero-code fraction of all 1001 parameters.
inline double sparsity(const MlpfWeights& w) {
    int zeros = 0;
    for (const auto& row : w.w1)
        for (std::int16_t c : row) zeros += c == 0;
    for (std::int16_t c : w.b1) zeros += c == 0;
    for (std::int16_t c : w.w2) zeros += c == 0;
    zeros += w.b2 == 0;
    return static_cast<double>(zeros) / kParameterCount;
}

namespace detail {

inline std::string format_tag(QFormat f) {
    return (f.is_signed ? "s" : "u") + std::to_string(f.fraction_bits);
}

inline QFormat parse_signed_tag(const std::string& tag) {
    if (tag.size() < 2 || tag[0] != 's') throw WeightFileError("bad weight format tag '" + tag + "'");
    return signed_fraction_format(std::stoi(tag.substr(1)));
}

}  // namespace detail

// Line-oriented text weight file:
//   version=1 / arch=98-10-1 / layout=... / wfmt=s4 / afmt=u4/s16q9
//   [w1] 98 lines of 10 integers, [b1] one line of 10, [w2] one line of 10,
//   [b2] one line of 1.
inline void save_weights(std::ostream& out, const MlpfWeights& w) {
    out << "version=1\n";
    out << "arch=98-10-1\n";
    out << "layout=" << w.meta.layout << '\n';
    out << "wfmt=" << detail::format_tag(w.meta.weight_format) << '\n';
    out << "afmt=" << detail::format_tag(w.meta.hidden_format) << "/s16q9\n";
    out << "[w1]\n";
    for (int i = 0; i < kInputUnits; ++i) {
        for (int j = 0; j < kHiddenUnits; ++j) out << (j ? " " : "") << w.w1[i][j];
        out << '\n';
    }
    out << "[b1]\n";
    for (int j = 0; j < kHiddenUnits; ++j) out << (j ? " " : "") << w.b1[j];
    out << '\n';
    out << "[w2]\n";
    for (int j = 0; j < kHiddenUnits; ++j) out << (j ? " " : "") << w.w2[j];
    out << '\n';
    out << "[b2]\n" << w.b2 << '\n';
}

inline void save_weights(const std::string& path, const MlpfWeights& w) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw WeightFileError("cannot open '" + path + "' for writing");
    save_weights(out, w);
}

inline MlpfWeights load_weights(std::istream& in) {
    MlpfWeights w;

    const auto next_line = [&](std::string& line) {
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };
    const auto expect_kv = [&](const std::string& key) {
        std::string line;
        if (!next_line(line) || line.rfind(key + "=", 0) != 0)
            throw WeightFileError("expected '" + key + "=' header line");
        return line.substr(key.size() + 1);
    };

    if (expect_kv("version") != "1") throw WeightFileError("unsupported weight file version");
    if (expect_kv("arch") != "98-10-1") throw WeightFileError("unsupported architecture");
    w.meta.layout = expect_kv("layout");
    if (w.meta.layout != kCanonicalLayout)
        throw WeightFileError("unsupported layout '" + w.meta.layout + "'");
    w.meta.weight_format = detail::parse_signed_tag(expect_kv("wfmt"));

    const std::string afmt = expect_kv("afmt");
    const auto slash = afmt.find('/');
    if (slash == std::string::npos || afmt.substr(slash + 1) != "s16q9" || afmt[0] != 'u')
        throw WeightFileError("bad activation format '" + afmt + "'");
    w.meta.hidden_format = unsigned_fraction_format(std::stoi(afmt.substr(1, slash - 1)));
    w.meta.input_format = kInputFormat4;
    w.meta.acc_format = kAccumulatorFormat;

    const auto expect_section = [&](const std::string& name) {
        std::string line;
        if (!next_line(line) || line != "[" + name + "]")
            throw WeightFileError("expected section [" + name + "]");
    };
    const auto read_row = [&](std::span<std::int16_t> out) {
        std::string line;
        if (!next_line(line)) throw WeightFileError("parameter count mismatch: file truncated");
        std::istringstream row(line);
        long long v;
        for (auto& slot : out) {
            if (!(row >> v)) throw WeightFileError("parameter count mismatch: short row");
            slot = static_cast<std::int16_t>(v);
        }
        if (row >> v) throw WeightFileError("parameter count mismatch: extra values in row");
    };

    expect_section("w1");
    for (int i = 0; i < kInputUnits; ++i) read_row(w.w1[i]);
    expect_section("b1");
    read_row(w.b1);
    expect_section("w2");
    read_row(w.w2);
    expect_section("b2");
    std::array<std::int16_t, 1> b2{};
    read_row(b2);
    w.b2 = b2[0];

    std::string extra;
    if (next_line(extra)) throw WeightFileError("trailing content after [b2]");
    w.validate();
    return w;
}

inline MlpfWeights load_weights(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw WeightFileError("cannot open '" + path + "'");
    return load_weights(in);
}

}  // namespace mlpf
