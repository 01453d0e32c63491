#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "mtmc/synth.hpp"
#include "scenarios.hpp"

using namespace mtmc;
namespace fs = std::filesystem;

TEST(Synth, NoiselessSingleVehicleTwoCameras) {
    testutil::ChainOptions opt;
    opt.cameras = 2;
    opt.vehicles = 1;
    opt.sigma_emb = 0.0;
    opt.sigma_box = 0.0;
    const auto spec = testutil::chain_scenario(opt);
    const auto out = synth::generate(spec);

    ASSERT_EQ(out.detections.size(), 2u);
    ASSERT_EQ(out.gt.by_id.size(), 1u);
    // exactly one clean per-camera track: detections equal ground truth boxes
    for (int cam : {1, 2}) {
        const auto& dets = out.detections.at(cam);
        const auto& gt = out.gt.by_id.at(1).at(cam);
        ASSERT_EQ(dets.size(), gt.size());
        for (std::size_t i = 0; i < dets.size(); ++i) {
            EXPECT_EQ(dets[i].frame, gt[i].frame);
            EXPECT_DOUBLE_EQ(dets[i].box.x, gt[i].box.x);
        }
        // contiguous frames (no stop, no miss)
        for (std::size_t i = 1; i < dets.size(); ++i)
            EXPECT_EQ(dets[i].frame, dets[i - 1].frame + 1);
    }
    // one transition with the geometric travel time: 600 world units at the
    // vehicle's speed (between 9 and 11 units/frame)
    ASSERT_EQ(out.transitions.size(), 1u);
    const auto& t = out.transitions[0];
    EXPECT_EQ(t.src_camera, 1);
    EXPECT_EQ(t.dst_camera, 2);
    // travel across the 600-unit gap plus up to 5 clipped frames per side
    const double dt = static_cast<double>(t.entry_frame - t.exit_frame);
    EXPECT_GE(dt, 600.0 / 11.0 - 2.0);
    EXPECT_LE(dt, 600.0 / 9.0 + 12.0);
}

TEST(Synth, DeterministicForFixedSeed) {
    testutil::ChainOptions opt;
    opt.cameras = 2;
    opt.vehicles = 5;
    opt.sigma_emb = 0.1;
    opt.miss_rate = 0.05;
    opt.fp_rate = 0.02;
    opt.seed = 77;
    const auto spec = testutil::chain_scenario(opt);
    const auto a = synth::generate(spec);
    const auto b = synth::generate(spec);
    for (int cam : {1, 2}) {
        EXPECT_EQ(serialize_detections(a.detections.at(cam)),
                  serialize_detections(b.detections.at(cam)));
        EXPECT_EQ(serialize_embeddings(a.embeddings.at(cam)),
                  serialize_embeddings(b.embeddings.at(cam)));
        for (std::size_t i = 0; i < a.metadata.at(cam).size(); ++i)
            EXPECT_EQ(serialize_metadata(a.metadata.at(cam)[i]),
                      serialize_metadata(b.metadata.at(cam)[i]));
    }
    EXPECT_EQ(serialize_ground_truth(a.gt), serialize_ground_truth(b.gt));
    EXPECT_EQ(serialize_keypoints(a.keypoints), serialize_keypoints(b.keypoints));
    EXPECT_EQ(synth::transitions_csv(a.transitions), synth::transitions_csv(b.transitions));
}

TEST(Synth, SeedChangesOutputs) {
    testutil::ChainOptions opt;
    opt.cameras = 2;
    opt.vehicles = 3;
    opt.sigma_emb = 0.1;
    auto spec = testutil::chain_scenario(opt);
    const auto a = synth::generate(spec);
    spec.seed = 1234;
    const auto b = synth::generate(spec);
    EXPECT_NE(serialize_embeddings(a.embeddings.at(1)), serialize_embeddings(b.embeddings.at(1)));
}

TEST(Synth, StopEventCreatesReconnectableGap) {
    testutil::ChainOptions opt;
    opt.cameras = 1;
    opt.vehicles = 4;
    opt.sigma_emb = 0.0;
    opt.sigma_box = 0.0;
    opt.with_stop = true;
    opt.stop_duration = 120;
    const auto out = synth::generate(testutil::chain_scenario(opt));
    // every vehicle's camera-1 ground truth has one frame gap of exactly the
    // stop duration plus one (the stopped frames are hidden)
    for (const auto& [gid, cams] : out.gt.by_id) {
        const auto& dets = cams.at(1);
        int gaps = 0;
        for (std::size_t i = 1; i < dets.size(); ++i) {
            const std::int64_t jump = dets[i].frame - dets[i - 1].frame;
            if (jump > 1) {
                ++gaps;
                EXPECT_EQ(jump, 121);  // 120 hidden frames
            }
        }
        EXPECT_EQ(gaps, 1) << "vehicle " << gid;
    }
}

TEST(Synth, GroundTruthConservation) {
    testutil::ChainOptions opt;
    opt.cameras = 2;
    opt.vehicles = 6;
    opt.miss_rate = 0.1;
    const auto out = synth::generate(testutil::chain_scenario(opt));
    // every true detection belongs to exactly one (vehicle, camera) track;
    // misses thin the detection files but never the ground truth
    std::size_t gt_total = 0;
    for (const auto& [gid, cams] : out.gt.by_id)
        for (const auto& [cam, dets] : cams) gt_total += dets.size();
    std::size_t det_total = 0;
    for (const auto& [cam, dets] : out.detections) det_total += dets.size();
    EXPECT_LT(det_total, gt_total);       // some misses at rate 0.1
    EXPECT_GT(det_total, gt_total / 2);   // but nowhere near all of them
}

TEST(Synth, EmbeddingNoiseMatchesSigmaWithinTenPercent) {
    const double sigma = 0.08;
    auto rng = synth::stream_for(123, "noise-check");
    const Vec latent = synth::random_unit_vector(16, rng);
    double sq_sum = 0.0;
    std::size_t n = 0;
    for (int i = 0; i < 1500; ++i) {
        const Vec noisy = synth::add_gaussian_noise(latent, sigma, rng);
        for (int d = 0; d < 16; ++d) {
            const double e = noisy[d] - latent[d];
            sq_sum += e * e;
            ++n;
        }
    }
    const double est = std::sqrt(sq_sum / static_cast<double>(n));
    EXPECT_NEAR(est, sigma, 0.1 * sigma);
}

TEST(Synth, InfeasibleGeometryRejected) {
    testutil::ChainOptions opt;
    opt.cameras = 2;
    auto spec = testutil::chain_scenario(opt);
    spec.world = Box{0, 0, 10, 10};  // cameras clearly outside
    EXPECT_THROW(synth::generate(spec), ValidationError);
}

TEST(Synth, ScenarioJsonRoundTrip) {
    testutil::ChainOptions opt;
    opt.cameras = 3;
    opt.with_stop = true;
    const auto spec = testutil::chain_scenario(opt);
    const auto back = synth::scenario_from_json(synth::scenario_to_json(spec));
    EXPECT_EQ(back.cameras.size(), spec.cameras.size());
    EXPECT_EQ(back.stops.size(), 1u);
    EXPECT_DOUBLE_EQ(back.stops[0].s, spec.stops[0].s);
    EXPECT_EQ(back.vehicle_count, spec.vehicle_count);
    EXPECT_DOUBLE_EQ(back.noise.sigma_emb, spec.noise.sigma_emb);
    // identical generation from the round-tripped spec
    EXPECT_EQ(serialize_ground_truth(synth::generate(spec).gt),
              serialize_ground_truth(synth::generate(back).gt));
}

TEST(Synth, KeypointsFollowDrivingDirection) {
    testutil::ChainOptions opt;
    opt.cameras = 1;
    opt.vehicles = 1;
    opt.sigma_box = 0.0;
    const auto out = synth::generate(testutil::chain_scenario(opt));
    ASSERT_FALSE(out.keypoints.empty());
    for (const auto& [key, wk] : out.keypoints) {
        const double fx = (wk.front_left.x + wk.front_right.x) / 2.0;
        const double bx = (wk.back_left.x + wk.back_right.x) / 2.0;
        EXPECT_GT(fx, bx);  // the road runs in +x
    }
}
