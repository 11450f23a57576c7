#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mlpf {

enum class Label : std::uint8_t { noise = 0, signal = 1 };

// One DVS event. Timestamps are microseconds and non-decreasing within a
// stream; polarity is -1 (OFF) or +1 (ON).
struct Event {
    std::int64_t t_us = 0;
    std::int32_t x = 0;
    std::int32_t y = 0;
    std::int8_t polarity = 1;
    std::optional<Label> label{};

    friend bool operator==(const Event&, const Event&) = default;
};

struct SensorGeometry {
    std::int32_t width = 346;
    std::int32_t height = 260;

    constexpr bool contains(std::int32_t x, std::int32_t y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
    constexpr std::int64_t pixel_count() const {
        return static_cast<std::int64_t>(width) * height;
    }
    friend constexpr bool operator==(SensorGeometry, SensorGeometry) = default;
};

// Millisecond timestamp, obtained by right-shifting the microsecond
// timestamp by 10 bits (floor division by 1024).
inline std::int64_t ms_timestamp(std::int64_t t_us) { return t_us >> 10; }

inline std::uint16_t wrap16(std::int64_t t_ms) {
    return static_cast<std::uint16_t>(t_ms & 0xFFFF);
}

struct StreamError : std::runtime_error {
    StreamError(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
    std::size_t line_number;
};

struct ParseError : StreamError {
    using StreamError::StreamError;
};
struct OrderingError : StreamError {
    using StreamError::StreamError;
};
struct BoundsError : StreamError {
    using StreamError::StreamError;
};

namespace detail {

inline bool split_fields(std::string_view line, std::string_view* out, int want) {
    for (int i = 0; i < want; ++i) {
        const auto comma = line.find(',');
        if (i + 1 < want) {
            if (comma == std::string_view::npos) return false;
            out[i] = line.substr(0, comma);
            line.remove_prefix(comma + 1);
        } else {
            if (comma != std::string_view::npos) return false;
            out[i] = line;
        }
    }
    return true;
}

inline bool parse_int(std::string_view field, std::int64_t& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc{} && res.ptr == end && !field.empty();
}

inline std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

}  // namespace detail

// Event CSV: header "t_us,x,y,p" or "t_us,x,y,p,label"; p is 0 (OFF) / 1 (ON),
// label is 0 (noise) / 1 (signal). Timestamps must be non-decreasing and
// coordinates must fall inside the sensor.
inline std::vector<Event> parse_events(std::istream& in, SensorGeometry geometry = {}) {
    std::vector<Event> events;
    std::string raw;
    std::size_t line_no = 0;

    if (!std::getline(in, raw)) return events;  // empty input: empty stream
    ++line_no;
    const std::string_view header = detail::strip_cr(raw);
    bool labeled;
    if (header == "t_us,x,y,p")
        labeled = false;
    else if (header == "t_us,x,y,p,label")
        labeled = true;
    else
        throw ParseError("unrecognized header '" + std::string(header) + "'", line_no);

    std::int64_t prev_t = std::numeric_limits<std::int64_t>::min();
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = detail::strip_cr(raw);
        if (line.empty()) continue;

        std::string_view fields[5];
        const int want = labeled ? 5 : 4;
        if (!detail::split_fields(line, fields, want))
            throw ParseError("expected " + std::to_string(want) + " comma-separated fields", line_no);

        std::int64_t t, x, y, p, lab = 0;
        if (!detail::parse_int(fields[0], t) || !detail::parse_int(fields[1], x) ||
            !detail::parse_int(fields[2], y) || !detail::parse_int(fields[3], p) ||
            (labeled && !detail::parse_int(fields[4], lab)))
            throw ParseError("malformed integer field", line_no);
        if (p != 0 && p != 1) throw ParseError("polarity must be 0 or 1", line_no);
        if (labeled && lab != 0 && lab != 1) throw ParseError("label must be 0 or 1", line_no);
        if (t < prev_t) throw OrderingError("decreasing timestamp", line_no);
        if (!geometry.contains(static_cast<std::int32_t>(x), static_cast<std::int32_t>(y)))
            throw BoundsError("coordinate outside sensor", line_no);

        Event e;
        e.t_us = t;
        e.x = static_cast<std::int32_t>(x);
        e.y = static_cast<std::int32_t>(y);
        e.polarity = p == 1 ? std::int8_t{1} : std::int8_t{-1};
        if (labeled) e.label = lab == 1 ? Label::signal : Label::noise;
        events.push_back(e);
        prev_t = t;
    }
    return events;
}

inline void write_events(std::ostream& out, std::span<const Event> events, bool include_labels) {
    out << (include_labels ? "t_us,x,y,p,label\n" : "t_us,x,y,p\n");
    for (const Event& e : events) {
        out << e.t_us << ',' << e.x << ',' << e.y << ',' << (e.polarity > 0 ? 1 : 0);
        if (include_labels) out << ',' << (e.label == Label::signal ? 1 : 0);
        out << '\n';
    }
}

}  // namespace mlpf
