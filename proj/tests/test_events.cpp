#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "lgmd/errors.hpp"
#include "lgmd/events.hpp"
#include "lgmd/rng.hpp"

using namespace lgmd;

TEST_CASE("parse single record") {
    std::istringstream in("128 128\n1000,5,7,1\n");
    const auto stream = parse_event_file(in);
    CHECK(stream.width == 128);
    CHECK(stream.height == 128);
    REQUIRE(stream.events.size() == 1);
    CHECK(stream.events[0] == Event{1000, 5, 7, 1});
    CHECK(stream.duration_us == 1000);
}

TEST_CASE("parse header only") {
    std::istringstream in("64 48\n");
    const auto stream = parse_event_file(in);
    CHECK(stream.width == 64);
    CHECK(stream.height == 48);
    CHECK(stream.events.empty());
    CHECK(stream.duration_us == 0);
}

TEST_CASE("parse rejects unsorted timestamps") {
    std::istringstream in("128 128\n200,1,1,1\n100,2,2,0\n");
    CHECK_THROWS_AS(parse_event_file(in), UnsortedTimestamps);
}

TEST_CASE("parse rejects out-of-bounds coordinates") {
    std::istringstream in("16 16\n5,16,3,1\n");
    CHECK_THROWS_AS(parse_event_file(in), OutOfBounds);
}

TEST_CASE("parse reports the offending line") {
    std::istringstream in("16 16\n5,1,1,1\nnot-an-event\n");
    try {
        parse_event_file(in);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("parse rejects bad polarity") {
    std::istringstream in("16 16\n5,1,1,2\n");
    CHECK_THROWS_AS(parse_event_file(in), ParseError);
}

TEST_CASE("round-trip preserves the stream") {
    StimulusSpec spec;
    spec.duration_us = 200'000;
    const auto [stream, labels] = synthesize(spec, 7);
    std::ostringstream out;
    write_event_stream(stream, out);
    std::istringstream in(out.str());
    CHECK(parse_event_file(in) == stream);

    std::ostringstream lout;
    write_label_track(labels, lout);
    std::istringstream lin(lout.str());
    CHECK(parse_label_file(lin) == labels);
}

TEST_CASE("loom synthesis emits events and an all-loom track") {
    StimulusSpec spec;  // circle, loom, 266 px/s, 1 s, 128x128
    const auto [stream, labels] = synthesize(spec, 0);
    CHECK(!stream.events.empty());
    REQUIRE(labels.intervals.size() == 1);
    CHECK(labels.intervals[0] == LabelInterval{0, 1'000'000, Label::Looming});
    for (const auto& ev : stream.events) {
        CHECK(ev.t_us >= 0);
        CHECK(ev.t_us <= stream.duration_us);
        CHECK(ev.x >= 0);
        CHECK(ev.x < stream.width);
        CHECK(ev.y >= 0);
        CHECK(ev.y < stream.height);
    }
}

TEST_CASE("zero expansion rate yields an empty stream") {
    StimulusSpec spec;
    spec.expansion_rate = 0.0;
    const auto [stream, labels] = synthesize(spec, 0);
    CHECK(stream.events.empty());
}

TEST_CASE("translation is labelled non-looming") {
    StimulusSpec spec;
    spec.motion = Motion::TranslateLR;
    spec.duration_us = 300'000;
    const auto [stream, labels] = synthesize(spec, 0);
    for (const auto& iv : labels.intervals) CHECK(iv.label == Label::NonLooming);
}

TEST_CASE("oversized shape is degenerate") {
    StimulusSpec spec;
    spec.initial_diameter = 200.0;
    CHECK_THROWS_AS(synthesize(spec, 0), DegenerateStimulus);
}

TEST_CASE("label track covers the duration without gaps") {
    for (uint64_t seed : {1ull, 2ull, 9ull}) {
        const auto [stream, labels] = synthesize_composite(seed);
        REQUIRE(!labels.intervals.empty());
        CHECK(labels.intervals.front().start_us == 0);
        CHECK(labels.intervals.back().end_us == stream.duration_us);
        for (size_t i = 1; i < labels.intervals.size(); ++i)
            CHECK(labels.intervals[i].start_us == labels.intervals[i - 1].end_us);
    }
}

TEST_CASE("composite has eight looms and eight non-looms") {
    const auto [stream, labels] = synthesize_composite(0);
    int looms = 0, nonlooms = 0;
    for (const auto& iv : labels.intervals) {
        (iv.label == Label::Looming ? looms : nonlooms)++;
    }
    CHECK(looms == 8);
    CHECK(nonlooms == 8);
    CHECK(!stream.events.empty());
}

TEST_CASE("composite is deterministic per seed") {
    const auto a = synthesize_composite(42);
    const auto b = synthesize_composite(42);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
}

TEST_CASE("composite seeds differ in events but not interval count") {
    const auto a = synthesize_composite(1);
    const auto b = synthesize_composite(2);
    CHECK(a.second.intervals.size() == b.second.intervals.size());
    CHECK(a.first.events != b.first.events);
}

TEST_CASE("drop_events identity and full drop") {
    const auto [stream, labels] = synthesize_composite(3);
    CHECK(drop_events(stream, 0.0, 11) == stream);
    CHECK(drop_events(stream, 1.0, 11).events.empty());
    CHECK_THROWS_AS(drop_events(stream, 1.5, 11), InvalidProbability);
    CHECK_THROWS_AS(drop_events(stream, -0.1, 11), InvalidProbability);
}

TEST_CASE("drop_events keeps a binomially plausible count") {
    EventStream stream;
    stream.width = stream.height = 4;
    stream.duration_us = 10'000;
    const int n = 10'000;
    for (int i = 0; i < n; ++i) stream.events.push_back({i, i % 4, (i / 4) % 4, 1});
    const auto kept = drop_events(stream, 0.5, 123).events.size();
    // three binomial standard deviations around n/2
    const double sd = std::sqrt(n * 0.25);
    CHECK(kept > 5000 - 3 * sd);
    CHECK(kept < 5000 + 3 * sd);
}

TEST_CASE("drop_events is a sub-sequence operator") {
    const auto [stream, labels] = synthesize_composite(5);
    const auto dropped = drop_events(stream, 0.3, 99);
    size_t i = 0;
    for (const auto& ev : dropped.events) {
        while (i < stream.events.size() && !(stream.events[i] == ev)) ++i;
        REQUIRE(i < stream.events.size());
        ++i;
    }
}

TEST_CASE("pool_to_grid floor arithmetic") {
    EventStream stream;
    stream.width = stream.height = 128;
    stream.duration_us = 10;
    stream.events.push_back({5, 5, 7, 1});
    const auto pooled = pool_to_grid(stream, 32, 32);
    CHECK(pooled.events[0] == Event{5, 1, 1, 1});
    CHECK(pooled.width == 32);
}

TEST_CASE("pool_to_grid identity dims") {
    const auto [stream, labels] = synthesize_composite(6);
    CHECK(pool_to_grid(stream, stream.width, stream.height) == stream);
}

TEST_CASE("pool_to_grid maps a whole block to one pixel") {
    EventStream stream;
    stream.width = stream.height = 8;
    stream.duration_us = 16;
    for (int y = 4; y < 8; ++y)
        for (int x = 4; x < 8; ++x) stream.events.push_back({int64_t(y * 8 + x), x, y, 0});
    const auto pooled = pool_to_grid(stream, 2, 2);
    CHECK(pooled.events.size() == stream.events.size());
    for (const auto& ev : pooled.events) {
        CHECK(ev.x == 1);
        CHECK(ev.y == 1);
    }
}

TEST_CASE("pool_to_grid rejects non-divisible dims") {
    EventStream stream;
    stream.width = stream.height = 100;
    CHECK_THROWS_AS(pool_to_grid(stream, 32, 32), GridMismatch);
}

TEST_CASE("pooling preserves event count") {
    const auto [stream, labels] = synthesize_composite(8);
    CHECK(pool_to_grid(stream, 32, 32).events.size() == stream.events.size());
}
