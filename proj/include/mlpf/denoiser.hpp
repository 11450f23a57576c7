#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "mlpf/events.hpp"
#include "mlpf/network.hpp"
#include "mlpf/tpi.hpp"

namespace mlpf {

struct DenoiseConfig {
    SensorGeometry geometry{};
    AgeWindow tau{};
    MlpfWeights weights{};
    Threshold threshold{};
    bool emit_scores = true;
};

struct Decision {
    Event event{};
    Label predicted = Label::noise;
    std::int64_t score = 0;  // MLPF logit code, or the BAF sweep score
};

// Per event, strictly: extract features -> infer -> classify -> update the
// TPI. Sessions are sequential; the TPI is owned by the call.
inline std::vector<Decision> denoise_stream(std::span<const Event> events,
                                            const DenoiseConfig& cfg,
                                            SaturationCount* sat = nullptr) {
    TpiMemory tpi(cfg.geometry);
    std::vector<Decision> decisions;
    decisions.reserve(events.size());
    for (const Event& e : events) {
        const InputVector x = extract_features(tpi, e, cfg.tau, cfg.weights.meta.input_format);
        const Logit logit = infer_quantized(cfg.weights, x, sat);
        Decision d;
        d.event = e;
        d.predicted = classify(logit, cfg.threshold);
        d.score = logit.code;
        decisions.push_back(d);
        tpi.update(e);
    }
    return decisions;
}

// Floating-point twin of denoise_stream for the quantized-vs-float
// comparison; returns the sigmoid output per event.
inline std::vector<double> denoise_scores_float(std::span<const Event> events,
                                                SensorGeometry geometry, AgeWindow tau,
                                                const RealWeights& weights) {
    TpiMemory tpi(geometry);
    std::vector<double> scores;
    scores.reserve(events.size());
    for (const Event& e : events) {
        scores.push_back(infer_float(weights, extract_features_real(tpi, e, tau)));
        tpi.update(e);
    }
    return scores;
}

// Decision CSV: t_us,x,y,p,pred[,logit][,label]; pred and label are 0/1.
inline void write_decisions(std::ostream& out, std::span<const Decision> decisions,
                            bool emit_scores, bool include_labels) {
    out << "t_us,x,y,p,pred";
    if (emit_scores) out << ",logit";
    if (include_labels) out << ",label";
    out << '\n';
    for (const Decision& d : decisions) {
        out << d.event.t_us << ',' << d.event.x << ',' << d.event.y << ','
            << (d.event.polarity > 0 ? 1 : 0) << ',' << (d.predicted == Label::signal ? 1 : 0);
        if (emit_scores) out << ',' << d.score;
        if (include_labels) out << ',' << (d.event.label == Label::signal ? 1 : 0);
        out << '\n';
    }
}

struct ScoredLabels {
    std::vector<double> scores;
    std::vector<Label> labels;
};

// Reads back a decision CSV for ROC evaluation; requires both the logit and
// the label column.
inline ScoredLabels read_scored_decisions(std::istream& in) {
    std::string raw;
    std::size_t line_no = 0;
    if (!std::getline(in, raw)) throw ParseError("empty decision file", 1);
    ++line_no;
    const std::string_view header = detail::strip_cr(raw);
    if (header != "t_us,x,y,p,pred,logit,label")
        throw ParseError("decision file must carry logit and label columns", line_no);

    ScoredLabels out;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = detail::strip_cr(raw);
        if (line.empty()) continue;
        std::string_view fields[7];
        if (!detail::split_fields(line, fields, 7))
            throw ParseError("expected 7 comma-separated fields", line_no);
        std::int64_t logit, label;
        if (!detail::parse_int(fields[5], logit) || !detail::parse_int(fields[6], label))
            throw ParseError("malformed integer field", line_no);
        if (label != 0 && label != 1) throw ParseError("label must be 0 or 1", line_no);
        out.scores.push_back(static_cast<double>(logit));
        out.labels.push_back(label == 1 ? Label::signal : Label::noise);
    }
    return out;
}

}  // namespace mlpf
