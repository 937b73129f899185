#include "lgmd/events.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lgmd/errors.hpp"
#include "lgmd/rng.hpp"

namespace lgmd {

Label LabelTrack::at(int64_t t_us) const {
    for (const auto& iv : intervals) {
        if (t_us >= iv.start_us && t_us < iv.end_us) return iv.label;
    }
    // Closed upper boundary: t == duration belongs to the last interval.
    if (!intervals.empty() && t_us == intervals.back().end_us) return intervals.back().label;
    return Label::NonLooming;
}

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

EventStream parse_event_file(std::istream& in) {
    EventStream stream;
    std::string line;
    int line_no = 0;

    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    ++line_no;
    {
        std::istringstream hs(line);
        int64_t duration = -1;
        if (!(hs >> stream.width >> stream.height)) throw ParseError(line_no, "bad header");
        if (hs >> duration) stream.duration_us = duration;
        std::string rest;
        if (hs >> rest) throw ParseError(line_no, "trailing header fields");
        if (stream.width <= 0 || stream.height <= 0)
            throw ParseError(line_no, "non-positive dimensions");
    }

    int64_t prev_t = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Event ev;
        int pol = -1;
        char c1 = 0, c2 = 0, c3 = 0;
        std::istringstream ls(line);
        if (!(ls >> ev.t_us >> c1 >> ev.x >> c2 >> ev.y >> c3 >> pol) || c1 != ',' || c2 != ',' ||
            c3 != ',') {
            throw ParseError(line_no, "malformed event record");
        }
        std::string rest;
        if (ls >> rest) throw ParseError(line_no, "trailing fields");
        if (pol != 0 && pol != 1) throw ParseError(line_no, "polarity must be 0 or 1");
        ev.polarity = static_cast<uint8_t>(pol);
        if (ev.t_us < prev_t)
            throw UnsortedTimestamps("timestamps not non-decreasing at line " +
                                     std::to_string(line_no));
        if (ev.t_us < 0) throw OutOfBounds("negative timestamp at line " + std::to_string(line_no));
        if (ev.x < 0 || ev.x >= stream.width || ev.y < 0 || ev.y >= stream.height)
            throw OutOfBounds("event coordinates outside frame at line " + std::to_string(line_no));
        prev_t = ev.t_us;
        stream.events.push_back(ev);
    }

    int64_t last_t = stream.events.empty() ? 0 : stream.events.back().t_us;
    if (stream.duration_us == 0) {
        stream.duration_us = last_t;
    } else if (last_t > stream.duration_us) {
        throw ParseError(line_no, "event beyond declared duration");
    }
    return stream;
}

EventStream parse_event_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return parse_event_file(in);
}

void write_event_stream(const EventStream& stream, std::ostream& out) {
    out << stream.width << ' ' << stream.height << ' ' << stream.duration_us << '\n';
    for (const auto& ev : stream.events) {
        out << ev.t_us << ',' << ev.x << ',' << ev.y << ',' << int(ev.polarity) << '\n';
    }
}

void write_event_file(const EventStream& stream, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    write_event_stream(stream, out);
}

LabelTrack parse_label_file(std::istream& in) {
    LabelTrack track;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        LabelInterval iv;
        char c1 = 0, c2 = 0;
        std::string label;
        if (!(ls >> iv.start_us >> c1 >> iv.end_us >> c2) || c1 != ',' || c2 != ',')
            throw ParseError(line_no, "malformed label record");
        std::getline(ls, label);
        if (label == "loom") {
            iv.label = Label::Looming;
        } else if (label == "nonloom") {
            iv.label = Label::NonLooming;
        } else {
            throw ParseError(line_no, "label must be loom or nonloom");
        }
        if (!track.intervals.empty() && iv.start_us != track.intervals.back().end_us)
            throw ParseError(line_no, "intervals must be contiguous");
        if (iv.end_us <= iv.start_us) throw ParseError(line_no, "empty interval");
        track.intervals.push_back(iv);
    }
    return track;
}

LabelTrack parse_label_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return parse_label_file(in);
}

void write_label_track(const LabelTrack& track, std::ostream& out) {
    for (const auto& iv : track.intervals) {
        out << iv.start_us << ',' << iv.end_us << ','
            << (iv.label == Label::Looming ? "loom" : "nonloom") << '\n';
    }
}

void write_label_file(const LabelTrack& track, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    write_label_track(track, out);
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

namespace {

constexpr int64_t kFramePitchUs = 1000;  // 1 ms frame pitch

struct ShapePose {
    double cx, cy;       // centre, px
    double diameter;     // px; <= 0 renders nothing
};

// Binarised render: true = dark pixel.
void render(const StimulusSpec& spec, const ShapePose& pose, std::vector<uint8_t>& frame) {
    std::fill(frame.begin(), frame.end(), 0);
    if (pose.diameter <= 0) return;
    const double r = pose.diameter / 2.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(pose.cx - r - 1)));
    const int x1 = std::min<int>(spec.width - 1, static_cast<int>(std::ceil(pose.cx + r + 1)));
    const int y0 = std::max(0, static_cast<int>(std::floor(pose.cy - r - 1)));
    const int y1 = std::min<int>(spec.height - 1, static_cast<int>(std::ceil(pose.cy + r + 1)));
    for (int y = y0; y <= y1; ++y) {
        const double dy = (y + 0.5) - pose.cy;
        for (int x = x0; x <= x1; ++x) {
            const double dx = (x + 0.5) - pose.cx;
            bool inside = spec.shape == Shape::Circle ? (dx * dx + dy * dy <= r * r)
                                                      : (std::abs(dx) <= r && std::abs(dy) <= r);
            if (inside) frame[static_cast<size_t>(y) * spec.width + x] = 1;
        }
    }
}

// Pose of the shape at time t for a single-motion stimulus.
ShapePose pose_at(const StimulusSpec& spec, double t_s) {
    const double cx = spec.width / 2.0;
    const double cy = spec.height / 2.0;
    const double span = std::min(spec.width, spec.height);
    switch (spec.motion) {
        case Motion::Loom:
            return {cx, cy, spec.initial_diameter + spec.expansion_rate * t_s};
        case Motion::Shrink:
            return {cx, cy, span - spec.expansion_rate * t_s};
        case Motion::TranslateLR: {
            const double d = spec.initial_diameter;
            return {-d / 2.0 + spec.expansion_rate * t_s, cy, d};
        }
        case Motion::TranslateRL: {
            const double d = spec.initial_diameter;
            return {spec.width + d / 2.0 - spec.expansion_rate * t_s, cy, d};
        }
    }
    return {cx, cy, 0};
}

// Deterministic per-pixel timestamp jitter inside the frame interval. DVS
// pixels report asynchronously; emitting a whole frame at one microsecond
// would synchronise the surround inhibition unrealistically.
int64_t pixel_jitter_us(int32_t x, int32_t y, int64_t frame, uint64_t seed) {
    uint64_t z = seed ^ (uint64_t(uint32_t(x)) << 40) ^ (uint64_t(uint32_t(y)) << 20) ^
                 uint64_t(frame);
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return static_cast<int64_t>(z % static_cast<uint64_t>(kFramePitchUs));
}

// Diff two frames into events spread across (t_us - 1 ms, t_us].
void diff_frames(const std::vector<uint8_t>& prev, const std::vector<uint8_t>& cur,
                 const StimulusSpec& spec, int64_t t_us, uint64_t seed, std::vector<Event>& out) {
    const size_t first = out.size();
    for (int32_t y = 0; y < spec.height; ++y) {
        const size_t row = static_cast<size_t>(y) * spec.width;
        for (int32_t x = 0; x < spec.width; ++x) {
            const uint8_t a = prev[row + x];
            const uint8_t b = cur[row + x];
            if (a == b) continue;
            // Dark-on-light: pixel turning dark is a luminance drop -> ON.
            uint8_t pol = (b && !a) ? 1 : 0;
            if (!spec.dark_on_light) pol ^= 1;
            const int64_t t = t_us - pixel_jitter_us(x, y, t_us / kFramePitchUs, seed);
            out.push_back({t, x, y, pol});
        }
    }
    std::stable_sort(out.begin() + first, out.end(),
                     [](const Event& a, const Event& b) { return a.t_us < b.t_us; });
}

}  // namespace

std::pair<EventStream, LabelTrack> synthesize(const StimulusSpec& spec, uint64_t seed) {
    if (spec.expansion_rate < 0) throw DegenerateStimulus("negative expansion rate");
    if (spec.width <= 0 || spec.height <= 0) throw DegenerateStimulus("empty frame");
    const double span = std::min(spec.width, spec.height);
    if (pose_at(spec, 0.0).diameter > span)
        throw DegenerateStimulus("shape larger than frame at t=0");

    EventStream stream;
    stream.width = spec.width;
    stream.height = spec.height;
    stream.duration_us = spec.duration_us;

    const int64_t n_frames = spec.duration_us / kFramePitchUs;
    std::vector<uint8_t> prev(static_cast<size_t>(spec.width) * spec.height);
    std::vector<uint8_t> cur(prev.size());
    render(spec, pose_at(spec, 0.0), prev);
    for (int64_t f = 1; f <= n_frames; ++f) {
        const double t_s = static_cast<double>(f) * kFramePitchUs * 1e-6;
        render(spec, pose_at(spec, t_s), cur);
        diff_frames(prev, cur, spec, f * kFramePitchUs, seed, stream.events);
        std::swap(prev, cur);
    }

    LabelTrack track;
    track.intervals.push_back({0, spec.duration_us,
                               spec.motion == Motion::Loom ? Label::Looming : Label::NonLooming});
    return {std::move(stream), std::move(track)};
}

// ---------------------------------------------------------------------------
// Composite benchmark
// ---------------------------------------------------------------------------

namespace {

// Composite geometry. Looms grow from kSmallDiameter to kLargeDiameter and
// hold briefly so the network's response tail stays inside the loom label;
// shrinks run the loom in reverse; translations cross the frame at the
// segment speed. Values are fractions of min(width, height) at 128 px.
constexpr double kSmallDiameter = 8.0;
constexpr double kLargeDiameter = 96.0;
constexpr double kTranslateDiameter = 20.0;
constexpr int64_t kLoomTailUs = 400'000;
constexpr int64_t kShrinkTailUs = 100'000;
// Contraction accelerates from rest over this ramp so the shrink onset is a
// motion cue rather than a step discontinuity.
constexpr double kShrinkRampS = 0.2;
constexpr double kRateLow = 700.0;    // px/s, slowest segment
constexpr double kRateHigh = 1478.0;  // px/s, fastest segment

struct Segment {
    int64_t start_us;
    int64_t end_us;
    Label label;
    // Looms grow from the small disc; a loom that precedes a translation ends
    // in a collision flash (the filled disc blinks out inside the loom label)
    // so the following segment starts from a blank frame. Shrinks run the
    // loom in reverse with an eased onset; translations cross the frame.
    enum Kind { Grow, GrowThenFlash, ShrinkHold, Translate } kind;
    double rate = 0;
    bool left_to_right = true;
};

ShapePose composite_pose(const Segment& seg, double scale, double cx, double cy, double frame_w,
                         double local_s) {
    const double d0 = kSmallDiameter * scale;
    const double d1 = kLargeDiameter * scale;
    switch (seg.kind) {
        case Segment::Grow: {
            double d = std::min(d0 + seg.rate * local_s, d1);
            return {cx, cy, d};
        }
        case Segment::GrowThenFlash: {
            const double grow_s = (d1 - d0) / seg.rate;
            const double flash_at = grow_s + 0.08;
            if (local_s < flash_at) {
                double d = std::min(d0 + seg.rate * local_s, d1);
                return {cx, cy, d};
            }
            // Collision: the filled disc sweeps out of view at four times the
            // approach rate.
            const double d = d1 - 4.0 * seg.rate * (local_s - flash_at);
            return {cx, cy, std::max(d, 0.0)};
        }
        case Segment::ShrinkHold: {
            const double travelled = local_s < kShrinkRampS
                                         ? seg.rate * local_s * local_s / (2.0 * kShrinkRampS)
                                         : seg.rate * (local_s - kShrinkRampS / 2.0);
            return {cx, cy, std::max(d1 - travelled, d0)};
        }
        case Segment::Translate: {
            const double d = kTranslateDiameter * scale;
            const double x0 = seg.left_to_right ? -d / 2.0 : frame_w + d / 2.0;
            const double dir = seg.left_to_right ? 1.0 : -1.0;
            return {x0 + dir * seg.rate * local_s, cy, d};
        }
    }
    return {cx, cy, 0};
}

}  // namespace

std::pair<EventStream, LabelTrack> synthesize_composite(uint64_t seed) {
    return synthesize_composite(seed, 128, 128);
}

std::pair<EventStream, LabelTrack> synthesize_composite(uint64_t seed, int32_t width,
                                                        int32_t height) {
    if (width <= 0 || height <= 0) throw DegenerateStimulus("empty frame");
    Rng rng(seed);
    const double scale = std::min(width, height) / 128.0;
    const double cx = width / 2.0;
    const double cy = height / 2.0;

    std::vector<Segment> segments;
    int64_t t = 0;
    for (int k = 0; k < 8; ++k) {
        const double base = kRateLow + (kRateHigh - kRateLow) * (k / 7.0);
        const double loom_rate = base * rng.uniform(0.9, 1.1) * scale;
        const double non_rate = 1.3 * base * rng.uniform(0.9, 1.1) * scale;
        const bool shrink_next = (k % 2 == 0);

        const double grow_s = (kLargeDiameter - kSmallDiameter) * scale / loom_rate;
        Segment loom;
        loom.start_us = t;
        loom.end_us = t + static_cast<int64_t>(std::llround(grow_s * 1e6)) + kLoomTailUs;
        loom.label = Label::Looming;
        loom.kind = shrink_next ? Segment::Grow : Segment::GrowThenFlash;
        loom.rate = loom_rate;
        segments.push_back(loom);
        t = loom.end_us;

        Segment non;
        non.start_us = t;
        non.label = Label::NonLooming;
        non.rate = non_rate;
        if (shrink_next) {
            const double shrink_s =
                (kLargeDiameter - kSmallDiameter) * scale / non_rate + kShrinkRampS / 2.0;
            non.kind = Segment::ShrinkHold;
            non.end_us = t + static_cast<int64_t>(std::llround(shrink_s * 1e6)) + kShrinkTailUs;
        } else {
            non.kind = Segment::Translate;
            non.left_to_right = rng.uniform() < 0.5;
            const double cross_s = (width + kTranslateDiameter * scale) / non_rate;
            non.end_us = t + static_cast<int64_t>(std::llround(cross_s * 1e6)) + kShrinkTailUs;
        }
        segments.push_back(non);
        t = non.end_us;
    }

    // Round the total duration up to a whole frame.
    int64_t duration = ((t + kFramePitchUs - 1) / kFramePitchUs) * kFramePitchUs;
    segments.back().end_us = duration;

    EventStream stream;
    stream.width = width;
    stream.height = height;
    stream.duration_us = duration;

    StimulusSpec render_spec;  // carries dims/shape for the rasteriser
    render_spec.width = width;
    render_spec.height = height;
    render_spec.shape = Shape::Circle;

    std::vector<uint8_t> prev(static_cast<size_t>(width) * height);
    std::vector<uint8_t> cur(prev.size());
    size_t seg_idx = 0;
    auto pose_of = [&](int64_t t_us) {
        while (seg_idx + 1 < segments.size() && t_us >= segments[seg_idx].end_us) ++seg_idx;
        const Segment& seg = segments[seg_idx];
        const double local_s = (t_us - seg.start_us) * 1e-6;
        return composite_pose(seg, scale, cx, cy, width, local_s);
    };
    render(render_spec, pose_of(0), prev);
    for (int64_t f = 1; f * kFramePitchUs <= duration; ++f) {
        const int64_t t_us = f * kFramePitchUs;
        render(render_spec, pose_of(t_us), cur);
        diff_frames(prev, cur, render_spec, t_us, seed, stream.events);
        std::swap(prev, cur);
    }

    LabelTrack track;
    for (const auto& seg : segments)
        track.intervals.push_back({seg.start_us, seg.end_us, seg.label});
    return {std::move(stream), std::move(track)};
}

// ---------------------------------------------------------------------------
// Filters
// ---------------------------------------------------------------------------

EventStream drop_events(const EventStream& stream, double p, uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidProbability("drop probability outside [0,1]");
    EventStream out;
    out.width = stream.width;
    out.height = stream.height;
    out.duration_us = stream.duration_us;
    Rng rng(seed);
    for (const auto& ev : stream.events) {
        if (rng.uniform() >= p) out.events.push_back(ev);
    }
    return out;
}

EventStream pool_to_grid(const EventStream& stream, int32_t target_w, int32_t target_h) {
    if (target_w <= 0 || target_h <= 0 || stream.width % target_w != 0 ||
        stream.height % target_h != 0) {
        throw GridMismatch("target dims must divide source dims");
    }
    const int32_t fx = stream.width / target_w;
    const int32_t fy = stream.height / target_h;
    EventStream out;
    out.width = target_w;
    out.height = target_h;
    out.duration_us = stream.duration_us;
    out.events.reserve(stream.events.size());
    for (const auto& ev : stream.events) {
        out.events.push_back({ev.t_us, ev.x / fx, ev.y / fy, ev.polarity});
    }
    return out;
}

}  // namespace lgmd
