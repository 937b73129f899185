#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace lgmd {

// One DVS-style change event. Timestamps are microseconds from stream start.
struct Event {
    int64_t t_us = 0;
    int32_t x = 0;
    int32_t y = 0;
    uint8_t polarity = 1;  // 1 = ON (light to dark), 0 = OFF

    bool operator==(const Event&) const = default;
};

struct EventStream {
    int32_t width = 0;
    int32_t height = 0;
    int64_t duration_us = 0;
    std::vector<Event> events;  // non-decreasing in t_us

    bool operator==(const EventStream&) const = default;
};

enum class Label : uint8_t { NonLooming = 0, Looming = 1 };

struct LabelInterval {
    int64_t start_us = 0;
    int64_t end_us = 0;
    Label label = Label::NonLooming;

    bool operator==(const LabelInterval&) const = default;
};

// Disjoint, sorted intervals covering [0, duration].
struct LabelTrack {
    std::vector<LabelInterval> intervals;

    Label at(int64_t t_us) const;
    int64_t duration_us() const { return intervals.empty() ? 0 : intervals.back().end_us; }

    bool operator==(const LabelTrack&) const = default;
};

enum class Shape : uint8_t { Circle, Square };
enum class Motion : uint8_t { Loom, Shrink, TranslateLR, TranslateRL };

struct StimulusSpec {
    Shape shape = Shape::Circle;
    Motion motion = Motion::Loom;
    double expansion_rate = 266.0;  // px/s growth of the shape diameter (or travel speed)
    int64_t duration_us = 1'000'000;
    bool dark_on_light = true;
    int32_t width = 128;
    int32_t height = 128;
    double initial_diameter = 8.0;  // px at t = 0 (looms and translations)
};

// Event CSV wire format.
//   line 1: "width height [duration_us]"
//   lines:  "t_us,x,y,polarity" with polarity in {0,1}
// The duration field is optional on input; absent, it is the last timestamp.
EventStream parse_event_file(std::istream& in);
EventStream parse_event_file(const std::string& path);
void write_event_stream(const EventStream& stream, std::ostream& out);
void write_event_file(const EventStream& stream, const std::string& path);

// Label CSV sidecar: lines "start_us,end_us,label", label in {loom,nonloom}.
LabelTrack parse_label_file(std::istream& in);
LabelTrack parse_label_file(const std::string& path);
void write_label_track(const LabelTrack& track, std::ostream& out);
void write_label_file(const LabelTrack& track, const std::string& path);

// Frame-differencing renderer: the shape is drawn binarised at 1 ms frame
// pitch and an event is emitted at every pixel whose value flips between
// consecutive frames (ON for light->dark).
std::pair<EventStream, LabelTrack> synthesize(const StimulusSpec& spec, uint64_t seed);

// Benchmark sequence of 8 looms interleaved with 8 non-looming segments
// (shrinks alternating with translations), speeds increasing across the
// sequence and jittered by the seed.
std::pair<EventStream, LabelTrack> synthesize_composite(uint64_t seed);
std::pair<EventStream, LabelTrack> synthesize_composite(uint64_t seed, int32_t width, int32_t height);

// Each event independently retained with probability 1-p.
EventStream drop_events(const EventStream& stream, double p, uint64_t seed);

// Remap (x,y) -> (x*target_w/width, y*target_h/height); timestamps unchanged.
// Target dims must divide the source dims.
EventStream pool_to_grid(const EventStream& stream, int32_t target_w, int32_t target_h);

}  // namespace lgmd
