#include <gtest/gtest.h>

#include <map>
#include <random>

#include "mtmc/metrics.hpp"

using namespace mtmc;

namespace {

std::vector<TrackRow> track(int cam, int id, std::int64_t from, std::int64_t to, double x0 = 0,
                            double step = 5) {
    std::vector<TrackRow> rows;
    for (std::int64_t f = from; f <= to; ++f)
        rows.push_back({cam, f, id, {x0 + step * static_cast<double>(f - from), 0, 20, 20}});
    return rows;
}

std::vector<TrackRow> concat(std::initializer_list<std::vector<TrackRow>> parts) {
    std::vector<TrackRow> all;
    for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return all;
}

}  // namespace

// ---------------------------------------------------------------------------
// idf1
// ---------------------------------------------------------------------------

TEST(Idf1, PerfectPredictions) {
    const auto gt = concat({track(1, 1, 0, 9), track(1, 2, 0, 9, 500), track(2, 7, 3, 12)});
    const EvalReport r = idf1(gt, gt, 0.5);
    EXPECT_DOUBLE_EQ(r.idf1, 1.0);
    EXPECT_DOUBLE_EQ(r.idp, 1.0);
    EXPECT_DOUBLE_EQ(r.idr, 1.0);
    EXPECT_EQ(r.idfp, 0);
    EXPECT_EQ(r.idfn, 0);
}

TEST(Idf1, EmptyPredictions) {
    const auto gt = track(1, 1, 0, 9);
    const EvalReport r = idf1({}, gt, 0.5);
    EXPECT_EQ(r.idtp, 0);
    EXPECT_DOUBLE_EQ(r.idf1, 0.0);
    EXPECT_EQ(r.idfn, 10);
}

TEST(Idf1, SplitTrackScoresExactlyHalf) {
    // one 10-frame ground-truth identity; the prediction splits it into two
    // 5-frame ids with perfect boxes. Enumerating both identity matchings,
    // the best covers 5 frames: IDTP=5, IDFN=5, IDFP=5 -> IDF1 = 0.5
    const auto gt = track(1, 1, 0, 9);
    auto pred = track(1, 10, 0, 4);
    const auto second = track(1, 11, 5, 9, 25);  // continues the same motion
    pred.insert(pred.end(), second.begin(), second.end());
    const EvalReport r = idf1(pred, gt, 0.5);
    EXPECT_EQ(r.idtp, 5);
    EXPECT_EQ(r.idfn, 5);
    EXPECT_EQ(r.idfp, 5);
    EXPECT_DOUBLE_EQ(r.idf1, 0.5);
}

TEST(Idf1, RelabelInvariance) {
    const auto gt = concat({track(1, 1, 0, 20), track(1, 2, 5, 30, 700), track(2, 3, 0, 15)});
    auto pred = concat({track(1, 4, 0, 18), track(1, 5, 6, 30, 700), track(2, 6, 2, 15)});
    const EvalReport base = evaluate(pred, gt, 0.5);
    std::map<int, int> relabel{{4, 901}, {5, 17}, {6, 3}};
    for (TrackRow& r : pred) r.id = relabel.at(r.id);
    const EvalReport renamed = evaluate(pred, gt, 0.5);
    EXPECT_DOUBLE_EQ(base.idf1, renamed.idf1);
    EXPECT_DOUBLE_EQ(base.idp, renamed.idp);
    EXPECT_DOUBLE_EQ(base.idr, renamed.idr);
    EXPECT_EQ(base.idtp, renamed.idtp);
    EXPECT_DOUBLE_EQ(base.mota, renamed.mota);
    EXPECT_DOUBLE_EQ(base.motp, renamed.motp);
    EXPECT_EQ(base.mostly_tracked, renamed.mostly_tracked);
}

TEST(Idf1, BothSideIdtpIdentity) {
    std::mt19937 rng(71);
    std::uniform_int_distribution<int> len(3, 12);
    std::uniform_real_distribution<double> pos(0.0, 300.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<TrackRow> gt, pred;
        for (int i = 0; i < 4; ++i) {
            const auto t = track(1, i + 1, 0, len(rng), pos(rng));
            gt.insert(gt.end(), t.begin(), t.end());
        }
        for (int i = 0; i < 3; ++i) {
            const auto t = track(1, i + 10, 0, len(rng), pos(rng));
            pred.insert(pred.end(), t.begin(), t.end());
        }
        const EvalReport r = idf1(pred, gt, 0.5);
        // IDTP = sum len(tau) - IDFN and also sum len(gamma) - IDFP
        EXPECT_EQ(r.idtp, static_cast<std::int64_t>(gt.size()) - r.idfn);
        EXPECT_EQ(r.idtp, static_cast<std::int64_t>(pred.size()) - r.idfp);
        if (r.idtp + r.idfp > 0 && r.idtp + r.idfn > 0 && r.idp + r.idr > 0) {
            const double harmonic = 2.0 * r.idp * r.idr / (r.idp + r.idr);
            EXPECT_NEAR(r.idf1, harmonic, 1e-9);
        }
    }
}

// ---------------------------------------------------------------------------
// clear_mot
// ---------------------------------------------------------------------------

TEST(ClearMot, PerfectPredictions) {
    const auto gt = concat({track(1, 1, 0, 49), track(1, 2, 10, 59, 900)});
    const EvalReport r = clear_mot(gt, gt, 0.5);
    EXPECT_DOUBLE_EQ(r.mota, 1.0);
    EXPECT_DOUBLE_EQ(r.recall, 1.0);
    EXPECT_DOUBLE_EQ(r.motp, 1.0);
    EXPECT_EQ(r.mostly_tracked, 2);
    EXPECT_EQ(r.id_switches, 0);
}

TEST(ClearMot, NoPredictions) {
    const auto gt = track(1, 1, 0, 49);
    const EvalReport r = clear_mot({}, gt, 0.5);
    EXPECT_DOUBLE_EQ(r.mota, 0.0);  // 1 - FN/GT with FN = GT
    EXPECT_DOUBLE_EQ(r.recall, 0.0);
    EXPECT_EQ(r.mostly_tracked, 0);
}

TEST(ClearMot, OneSwitchCostsOnePercentOfHundredBoxes) {
    const auto gt = track(1, 1, 0, 99);  // 100 boxes
    auto pred = track(1, 5, 0, 49);
    const auto tail = track(1, 6, 50, 99, 250);  // same motion, new id
    pred.insert(pred.end(), tail.begin(), tail.end());
    const EvalReport r = clear_mot(pred, gt, 0.5);
    EXPECT_EQ(r.id_switches, 1);
    EXPECT_EQ(r.false_negatives, 0);
    EXPECT_EQ(r.false_positives, 0);
    EXPECT_DOUBLE_EQ(r.mota, 1.0 - 1.0 / 100.0);
}

TEST(ClearMot, ContinuityPreferredOverHigherIou) {
    // at frame 1 a second prediction overlaps the ground truth slightly
    // better, but the frame-0 correspondence must win to avoid a switch
    std::vector<TrackRow> gt{{1, 0, 1, {0, 0, 20, 20}}, {1, 1, 1, {2, 0, 20, 20}}};
    std::vector<TrackRow> pred{
        {1, 0, 7, {0, 0, 20, 20}},
        {1, 1, 7, {4, 0, 20, 20}},  // continuation, IOU lower
        {1, 1, 8, {2, 0, 20, 20}},  // impostor, IOU 1.0
    };
    const EvalReport r = clear_mot(pred, gt, 0.5);
    EXPECT_EQ(r.id_switches, 0);
    EXPECT_EQ(r.false_positives, 1);  // the impostor stays unmatched
}

TEST(ClearMot, MostlyTrackedNeedsEightyPercent) {
    const auto gt = track(1, 1, 0, 9);  // 10 boxes
    const EvalReport almost = clear_mot(track(1, 2, 0, 7), gt, 0.5);   // 8/10
    const EvalReport under = clear_mot(track(1, 2, 0, 6), gt, 0.5);    // 7/10
    EXPECT_EQ(almost.mostly_tracked, 1);
    EXPECT_EQ(under.mostly_tracked, 0);
}

// ---------------------------------------------------------------------------
// camera set validation
// ---------------------------------------------------------------------------

TEST(CameraSets, ExtraPredictionCamerasListed) {
    const auto gt = track(1, 1, 0, 5);
    const auto pred = concat({track(1, 1, 0, 5), track(3, 2, 0, 5), track(9, 3, 0, 5)});
    try {
        check_camera_sets(pred, gt);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("3"), std::string::npos);
        EXPECT_NE(msg.find("9"), std::string::npos);
    }
    EXPECT_NO_THROW(check_camera_sets(track(1, 4, 0, 3), gt));
    EXPECT_NO_THROW(check_camera_sets({}, gt));
}
