#include <gtest/gtest.h>

#include <random>

#include "mtmc/clm.hpp"

using namespace mtmc;

namespace {

ZoneVisit visit(int zone, double alpha, std::int64_t first, std::int64_t last = -1) {
    return {zone, alpha, first, last < 0 ? first : last};
}

TrajZoneProfile profile_with(int cam, int id, std::vector<ZoneVisit> visits, std::int64_t first,
                             std::int64_t last, int pair = -1) {
    TrajZoneProfile p;
    p.key = {cam, id};
    p.pair_id = pair;
    p.visits = std::move(visits);
    p.first_frame = first;
    p.last_frame = last;
    return p;
}

Trajectory straight_traj(int cam, int id, std::int64_t start, int n, double x0, double dx,
                         double y, double box = 20.0) {
    Trajectory t;
    t.camera_id = cam;
    t.local_id = id;
    for (int i = 0; i < n; ++i) {
        Detection d;
        d.camera_id = cam;
        d.frame = start + i;
        d.det_index = 0;
        d.box = {x0 + dx * i - box / 2, y - box / 2, box, box};
        t.detections.push_back(d);
    }
    return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// zone_pair_distance: Eq.-style worked cases
// ---------------------------------------------------------------------------

TEST(ZonePairDistance, PerfectPassIsZero) {
    const ZonePair p{1, 1, 1, 2};
    EXPECT_DOUBLE_EQ(zone_pair_distance(p, {visit(1, 1.0, 0), visit(2, 1.0, 10)}), 0.0);
}

TEST(ZonePairDistance, WorkedSummation) {
    // |1-0.9| + |1-0.8| + |0-0.2| = 0.5
    const ZonePair p{1, 1, 1, 2};
    const double d =
        zone_pair_distance(p, {visit(1, 0.9, 0), visit(2, 0.8, 10), visit(3, 0.2, 5)});
    EXPECT_NEAR(d, 0.5, 1e-12);
}

TEST(ZonePairDistance, OrderConflictIsInfinity) {
    const ZonePair p{1, 1, 1, 2};
    const double d = zone_pair_distance(p, {visit(2, 1.0, 0), visit(1, 1.0, 10)});
    EXPECT_TRUE(std::isinf(d));
}

TEST(ZonePairDistance, AlphaOutsideRangeRejected) {
    const ZonePair p{1, 1, 1, 2};
    EXPECT_THROW(zone_pair_distance(p, {visit(1, 1.2, 0)}), ValidationError);
}

TEST(ZonePairDistance, NonnegativeAndZeroOnlyOnExactCover) {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const ZonePair p{1, 1, 1, 2};
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<ZoneVisit> visits;
        const int n = static_cast<int>(unit(rng) * 4);
        for (int i = 0; i < n; ++i)
            visits.push_back(visit(1 + static_cast<int>(unit(rng) * 4), unit(rng), i));
        const double d = zone_pair_distance(p, visits);
        EXPECT_GE(d, 0.0);
        bool exact = false;
        if (visits.size() >= 2) {
            const ZoneVisit *e = nullptr, *x = nullptr;
            bool extra = false;
            for (const auto& v : visits) {
                if (v.zone_id == 1 && !e) e = &v;
                else if (v.zone_id == 2 && !x) x = &v;
                else if (v.alpha > 0.0) extra = true;
            }
            exact = e && x && !extra && e->alpha == 1.0 && x->alpha == 1.0 &&
                    e->first_frame <= x->first_frame;
        }
        if (d == 0.0) {
            EXPECT_TRUE(exact);
        }
        if (exact) {
            EXPECT_DOUBLE_EQ(d, 0.0);
        }
    }
}

TEST(ZonePairDistance, UnvisitedZonesNeverChangeAssignment) {
    // zones outside P and V contribute alpha = 0 terms and nothing else
    const ZonePair p{1, 1, 1, 2};
    const std::vector<ZoneVisit> visits{visit(1, 0.7, 0), visit(2, 0.6, 8)};
    const double base = zone_pair_distance(p, visits);
    // a new zone id 9 exists in the camera but was never visited: the visit
    // list is unchanged, so the distance must be identical
    EXPECT_DOUBLE_EQ(zone_pair_distance(p, visits), base);
}

// ---------------------------------------------------------------------------
// assign_zone_pair
// ---------------------------------------------------------------------------

TEST(AssignZonePair, FourPairScenarioPicksA) {
    // two entry zones (1, 3), two exit zones (2, 4); the vehicle passes
    // 1 -> 2 with high overlap and only clips zone 3
    std::vector<ZonePair> pairs{
        {1, 1, 1, 2},  // A
        {1, 2, 1, 4},  // B
        {1, 3, 3, 2},  // C
        {1, 4, 3, 4},  // D
    };
    const auto profile = profile_with(
        1, 1, {visit(1, 0.9, 0), visit(3, 0.2, 5), visit(2, 0.8, 10)}, 0, 10);
    // direct summation: A = 0.1+0.2+0.2 = 0.5, B = 0.1+1+0.8+0.2 = 2.1,
    // C = 0.8+0.2+0.9 = 1.9, D = 0.8+1+0.9+0.8 = 3.5
    EXPECT_NEAR(zone_pair_distance(pairs[0], profile.visits), 0.5, 1e-12);
    EXPECT_NEAR(zone_pair_distance(pairs[1], profile.visits), 2.1, 1e-12);
    EXPECT_NEAR(zone_pair_distance(pairs[2], profile.visits), 1.9, 1e-12);
    EXPECT_NEAR(zone_pair_distance(pairs[3], profile.visits), 3.5, 1e-12);
    EXPECT_EQ(assign_zone_pair(profile, pairs, 1.5), 1);
}

TEST(AssignZonePair, NoTouchReturnsNone) {
    std::vector<ZonePair> pairs{{1, 1, 1, 2}};
    const auto profile = profile_with(1, 1, {}, 0, 10);
    // distance would be 2.0 > max_pair_distance 1.5
    EXPECT_EQ(assign_zone_pair(profile, pairs, 1.5), -1);
}

TEST(AssignZonePair, TieGoesToLowestPairId) {
    std::vector<ZonePair> pairs{{1, 1, 1, 2}, {1, 2, 1, 4}};
    // only the shared entry zone is visited: both pairs distance 1.0
    const auto profile = profile_with(1, 1, {visit(1, 1.0, 0)}, 0, 10);
    EXPECT_EQ(assign_zone_pair(profile, pairs, 1.5), 1);
}

// ---------------------------------------------------------------------------
// zone profiles
// ---------------------------------------------------------------------------

TEST(ZoneProfile, AlphaIsMaxOverFramesAndVisitWindowTracked) {
    std::vector<Zone> zones{{1, 1, {100, 0, 40, 40}, 1, 1, ZoneClass::entry}};
    // 20x20 box sliding through the 40x40 zone: alpha peaks at full coverage
    const Trajectory t = straight_traj(1, 1, 0, 30, 0.0, 10.0, 20.0);
    const auto p = compute_zone_profile(t, zones);
    ASSERT_EQ(p.visits.size(), 1u);
    EXPECT_EQ(p.visits[0].zone_id, 1);
    EXPECT_DOUBLE_EQ(p.visits[0].alpha, 1.0);
    EXPECT_EQ(p.entry_time(1), p.visits[0].first_frame);
    EXPECT_EQ(p.exit_time(1), p.visits[0].last_frame);
    EXPECT_LT(p.visits[0].first_frame, p.visits[0].last_frame);
    // untouched zone falls back to the trajectory ends
    EXPECT_EQ(p.entry_time(99), t.first_frame());
    EXPECT_EQ(p.exit_time(99), t.last_frame());
}

TEST(BuildZonePairs, EntryExitCombinations) {
    std::vector<Zone> zones{
        {1, 1, {0, 0, 10, 10}, 9, 0, ZoneClass::entry},
        {1, 2, {500, 0, 10, 10}, 0, 9, ZoneClass::exit},
        {1, 3, {250, 0, 50, 50}, 5, 5, ZoneClass::traffic_aware},
    };
    const auto pairs = build_zone_pairs(zones);
    // (1,2), (1,3), (3,2): traffic-aware can serve either side, never both
    ASSERT_EQ(pairs.size(), 3u);
    EXPECT_EQ(pairs[0].entry_zone_id, 1);
    EXPECT_EQ(pairs[0].exit_zone_id, 2);
    EXPECT_EQ(pairs[1].entry_zone_id, 1);
    EXPECT_EQ(pairs[1].exit_zone_id, 3);
    EXPECT_EQ(pairs[2].entry_zone_id, 3);
    EXPECT_EQ(pairs[2].exit_zone_id, 2);
    for (std::size_t i = 0; i < pairs.size(); ++i)
        EXPECT_EQ(pairs[i].pair_id, static_cast<int>(i) + 1);
}

// ---------------------------------------------------------------------------
// learn_links / valid_transition
// ---------------------------------------------------------------------------

namespace {

struct LinkFixture {
    std::map<int, std::vector<Zone>> zones;
    std::map<int, std::vector<ZonePair>> pairs;

    LinkFixture() {
        zones[1] = {{1, 1, {0, 0, 20, 40}, 9, 0, ZoneClass::entry},
                    {1, 2, {980, 0, 20, 40}, 0, 9, ZoneClass::exit}};
        zones[2] = {{2, 1, {0, 0, 20, 40}, 9, 0, ZoneClass::entry},
                    {2, 2, {980, 0, 20, 40}, 0, 9, ZoneClass::exit}};
        pairs[1] = build_zone_pairs(zones[1]);
        pairs[2] = build_zone_pairs(zones[2]);
    }

    TrainingTrack track(int gid, int cam, std::int64_t entry_f, std::int64_t exit_f) const {
        TrainingTrack t;
        t.global_id = gid;
        t.profile = profile_with(cam, gid, {visit(1, 0.9, entry_f), visit(2, 0.9, exit_f)},
                                 entry_f, exit_f, 1);
        return t;
    }
};

}  // namespace

TEST(LearnLinks, WindowFromSamplesPlusPadding) {
    LinkFixture fx;
    PipelineConfig cfg;  // percentiles 0/100, padding 10, min samples 3
    std::vector<TrainingTrack> tracks;
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> dt(40, 60);
    for (int v = 1; v <= 10; ++v) {
        const std::int64_t exit1 = 100 * v;
        std::int64_t delta = dt(rng);
        if (v == 1) delta = 40;  // pin the extremes so the window is exact
        if (v == 2) delta = 60;
        tracks.push_back(fx.track(v, 1, exit1 - 50, exit1));
        tracks.push_back(fx.track(v, 2, exit1 + delta, exit1 + delta + 50));
    }
    const CameraLinkModel model = learn_links(tracks, fx.zones, fx.pairs, cfg);
    ASSERT_EQ(model.links.size(), 1u);
    const CameraLink& l = model.links[0];
    EXPECT_EQ(l.src_camera, 1);
    EXPECT_EQ(l.dst_camera, 2);
    EXPECT_EQ(l.src_zone, 2);  // exit zone of the source pair
    EXPECT_EQ(l.dst_zone, 1);  // entry zone of the destination pair
    EXPECT_EQ(l.sample_count, 10);
    EXPECT_DOUBLE_EQ(l.dt_min, 30.0);  // min 40 - padding 10
    EXPECT_DOUBLE_EQ(l.dt_max, 70.0);  // max 60 + padding 10
}

TEST(LearnLinks, TooFewSamplesNoLink) {
    LinkFixture fx;
    PipelineConfig cfg;  // min_link_samples = 3
    std::vector<TrainingTrack> tracks;
    for (int v = 1; v <= 2; ++v) {
        tracks.push_back(fx.track(v, 1, 0, 100 * v));
        tracks.push_back(fx.track(v, 2, 100 * v + 50, 100 * v + 90));
    }
    EXPECT_TRUE(learn_links(tracks, fx.zones, fx.pairs, cfg).links.empty());
}

TEST(LearnLinks, BidirectionalTrafficGivesTwoLinks) {
    LinkFixture fx;
    PipelineConfig cfg;
    std::vector<TrainingTrack> tracks;
    for (int v = 1; v <= 3; ++v) {  // forward 1 -> 2
        tracks.push_back(fx.track(v, 1, 0, 100 + v));
        tracks.push_back(fx.track(v, 2, 150 + v, 250));
    }
    for (int v = 4; v <= 6; ++v) {  // reverse 2 -> 1
        tracks.push_back(fx.track(v, 2, 0, 100 + v));
        tracks.push_back(fx.track(v, 1, 150 + v, 250));
    }
    const CameraLinkModel model = learn_links(tracks, fx.zones, fx.pairs, cfg);
    ASSERT_EQ(model.links.size(), 2u);
    EXPECT_TRUE(model.find_link(1, 1, 2, 1) != nullptr);
    EXPECT_TRUE(model.find_link(2, 1, 1, 1) != nullptr);
}

TEST(LearnLinks, UnassignedTracksSkippedWithCount) {
    LinkFixture fx;
    PipelineConfig cfg;
    std::vector<TrainingTrack> tracks{fx.track(1, 1, 0, 100)};
    tracks[0].profile.pair_id = -1;
    const CameraLinkModel model = learn_links(tracks, fx.zones, fx.pairs, cfg);
    EXPECT_EQ(model.training_tracks_skipped, 1);
}

TEST(LearnLinks, MedianPercentilesCollapseTheWindow) {
    LinkFixture fx;
    PipelineConfig cfg;
    cfg.window_percentile_low = 50.0;
    cfg.window_percentile_high = 50.0;
    cfg.window_padding_frames = 0.0;
    std::vector<TrainingTrack> tracks;
    const int deltas[5] = {40, 45, 50, 55, 60};
    for (int v = 1; v <= 5; ++v) {
        const std::int64_t exit1 = 200 * v;
        tracks.push_back(fx.track(v, 1, exit1 - 50, exit1));
        tracks.push_back(fx.track(v, 2, exit1 + deltas[v - 1], exit1 + deltas[v - 1] + 50));
    }
    const CameraLinkModel model = learn_links(tracks, fx.zones, fx.pairs, cfg);
    ASSERT_EQ(model.links.size(), 1u);
    EXPECT_DOUBLE_EQ(model.links[0].dt_min, 50.0);  // median both ways
    EXPECT_DOUBLE_EQ(model.links[0].dt_max, 50.0);
}

TEST(ValidTransition, UnassignedPairNeverValid) {
    LinkFixture fx;
    PipelineConfig cfg;
    std::vector<TrainingTrack> tracks;
    for (int v = 1; v <= 3; ++v) {
        tracks.push_back(fx.track(v, 1, 0, 1000));
        tracks.push_back(fx.track(v, 2, 1050, 1200));
    }
    const CameraLinkModel model = learn_links(tracks, fx.zones, fx.pairs, cfg);
    auto src = profile_with(1, 7, {visit(1, 0.9, 0), visit(2, 0.9, 500)}, 0, 500, 1);
    auto dst = profile_with(2, 8, {visit(1, 0.9, 550), visit(2, 0.9, 700)}, 550, 700, 1);
    ASSERT_TRUE(valid_transition(src, dst, model));
    src.pair_id = -1;
    EXPECT_FALSE(valid_transition(src, dst, model));
}

TEST(ValidTransition, WindowMembership) {
    LinkFixture fx;
    PipelineConfig cfg;
    std::vector<TrainingTrack> tracks;
    for (int v = 1; v <= 3; ++v) {
        tracks.push_back(fx.track(v, 1, 0, 1000));
        tracks.push_back(fx.track(v, 2, 1050, 1200));  // dt = 50, window (40, 60)
    }
    const CameraLinkModel model = learn_links(tracks, fx.zones, fx.pairs, cfg);
    ASSERT_EQ(model.links.size(), 1u);

    const auto src = profile_with(1, 7, {visit(1, 0.9, 0), visit(2, 0.9, 500)}, 0, 500, 1);
    const auto in_window = profile_with(2, 8, {visit(1, 0.9, 550), visit(2, 0.9, 700)}, 550, 700, 1);
    const auto outside = profile_with(2, 9, {visit(1, 0.9, 580), visit(2, 0.9, 700)}, 580, 700, 1);
    EXPECT_TRUE(valid_transition(src, in_window, model));
    EXPECT_FALSE(valid_transition(src, outside, model));  // dt = 80 > 70
    // no link in the reverse combination of these cameras' pairs: swap roles
    EXPECT_FALSE(valid_transition(in_window, src, model));
}

// ---------------------------------------------------------------------------
// order constraint
// ---------------------------------------------------------------------------

TEST(OrderConsistent, TruthTable) {
    EXPECT_TRUE(order_consistent({100, 200}, {150, 260}));   // same order
    EXPECT_FALSE(order_consistent({100, 260}, {150, 200}));  // crossed
    EXPECT_TRUE(order_consistent({100, 200}, {100, 200}));   // simultaneous both sides
    EXPECT_FALSE(order_consistent({100, 200}, {100, 260}));  // tie only at the source
    EXPECT_FALSE(order_consistent({100, 200}, {150, 200}));  // tie only at the destination
}

TEST(OrderConsistent, SymmetricInItsArguments) {
    std::mt19937 rng(41);
    std::uniform_int_distribution<int> t(0, 50);
    for (int trial = 0; trial < 200; ++trial) {
        const LinkMatch a{t(rng), t(rng)}, b{t(rng), t(rng)};
        EXPECT_EQ(order_consistent(a, b), order_consistent(b, a));
    }
}

// ---------------------------------------------------------------------------
// model JSON round trip
// ---------------------------------------------------------------------------

TEST(ClmJson, RoundTrip) {
    LinkFixture fx;
    PipelineConfig cfg;
    std::vector<TrainingTrack> tracks;
    for (int v = 1; v <= 3; ++v) {
        tracks.push_back(fx.track(v, 1, 0, 100 + v));
        tracks.push_back(fx.track(v, 2, 150 + v, 250));
    }
    const CameraLinkModel model = learn_links(tracks, fx.zones, fx.pairs, cfg);
    const CameraLinkModel back = clm_from_json(clm_to_json(model));
    ASSERT_EQ(back.links.size(), model.links.size());
    EXPECT_DOUBLE_EQ(back.links[0].dt_min, model.links[0].dt_min);
    EXPECT_DOUBLE_EQ(back.links[0].dt_max, model.links[0].dt_max);
    EXPECT_EQ(back.zones.at(1).size(), 2u);
    EXPECT_EQ(back.zone_pairs.at(2).size(), 1u);
    EXPECT_EQ(back.zones.at(1)[0].cls, ZoneClass::entry);
}

TEST(ClmJson, DuplicateLinksRejected) {
    nlohmann::json j = {{"cameras", nlohmann::json::array()},
                        {"links",
                         {{{"src_camera", 1}, {"src_pair", 1}, {"src_zone", 2},
                           {"dst_camera", 2}, {"dst_pair", 1}, {"dst_zone", 1},
                           {"dt_min", 0.0}, {"dt_max", 10.0}, {"sample_count", 3}},
                          {{"src_camera", 1}, {"src_pair", 1}, {"src_zone", 2},
                           {"dst_camera", 2}, {"dst_pair", 1}, {"dst_zone", 1},
                           {"dt_min", 5.0}, {"dt_max", 15.0}, {"sample_count", 4}}}}};
    EXPECT_THROW(clm_from_json(j), ValidationError);
}
