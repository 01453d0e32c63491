#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "mtmc/io.hpp"
#include "mtmc/types.hpp"

namespace mtmc {

// ---------------------------------------------------------------------------
// trajectory-level appearance
// ---------------------------------------------------------------------------

/// Clip-pooled appearance feature: frames are grouped into clips of
/// `clip_size`, each clip is a weight-normalized average of its frames
/// (uniform when no weights are given), and the trajectory feature is the
/// plain mean of the clip features, L2-normalized.
inline Vec trajectory_appearance(const std::vector<Vec>& frame_embeddings,
                                 const std::vector<double>& weights, int clip_size) {
    if (frame_embeddings.empty())
        throw ValidationError("trajectory_appearance: no frame embeddings");
    if (!weights.empty() && weights.size() != frame_embeddings.size())
        throw ValidationError("trajectory_appearance: weight count " +
                              std::to_string(weights.size()) + " != frame count " +
                              std::to_string(frame_embeddings.size()));
    if (clip_size < 1) throw ValidationError("trajectory_appearance: clip_size must be >= 1");
    double wsum_all = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ValidationError("trajectory_appearance: negative weight");
        wsum_all += w;
    }
    if (!weights.empty() && wsum_all == 0.0)
        throw ValidationError("trajectory_appearance: weights sum to zero");

    Vec traj;
    std::size_t n_clips = 0;
    for (std::size_t start = 0; start < frame_embeddings.size(); start += clip_size) {
        const std::size_t end = std::min(start + static_cast<std::size_t>(clip_size),
                                         frame_embeddings.size());
        Vec clip;
        double wsum = 0.0;
        for (std::size_t i = start; i < end; ++i) {
            const double w = weights.empty() ? 1.0 : weights[i];
            add_in_place(clip, frame_embeddings[i], w);
            wsum += w;
        }
        if (wsum == 0.0) continue;  // clip of all-zero weights contributes nothing
        for (double& v : clip) v /= wsum;
        add_in_place(traj, clip);
        ++n_clips;
    }
    for (double& v : traj) v /= static_cast<double>(n_clips);
    return normalized(std::move(traj));
}

// ---------------------------------------------------------------------------
// metadata
// ---------------------------------------------------------------------------

/// Per-attribute trajectory metadata: the arithmetic mean of the per-frame
/// class-probability vectors.
inline Vec metadata_feature(const std::vector<Vec>& frame_probs) {
    if (frame_probs.empty()) throw ValidationError("metadata_feature: no rows");
    const std::size_t classes = frame_probs.front().size();
    Vec mean(classes, 0.0);
    for (const Vec& p : frame_probs) {
        if (p.size() != classes)
            throw ValidationError("metadata_feature: inconsistent class counts");
        add_in_place(mean, p);
    }
    for (double& v : mean) v /= static_cast<double>(frame_probs.size());
    return mean;
}

struct FusedFeature {
    Vec appearance;  // L2-normalized
    Vec metadata;    // concatenated attribute blocks, scaled by the fusion weight
    Vec full;        // appearance ++ metadata
};

/// Concatenate the normalized appearance feature with the three metadata
/// blocks, each scaled by `metadata_weight`.
inline FusedFeature fuse(const Vec& appearance, const Vec& meta_type, const Vec& meta_brand,
                         const Vec& meta_color, double metadata_weight) {
    FusedFeature f;
    f.appearance = appearance;
    f.metadata.reserve(meta_type.size() + meta_brand.size() + meta_color.size());
    for (const Vec* block : {&meta_type, &meta_brand, &meta_color})
        for (double v : *block) f.metadata.push_back(metadata_weight * v);
    f.full = f.appearance;
    f.full.insert(f.full.end(), f.metadata.begin(), f.metadata.end());
    return f;
}

/// Euclidean distance between two fused feature vectors.
inline double pair_distance(const Vec& a, const Vec& b) { return euclidean_distance(a, b); }

// ---------------------------------------------------------------------------
// driving direction
// ---------------------------------------------------------------------------

/// Driving direction in degrees, measured counterclockwise from the positive
/// x axis in math coordinates (y up), from the back-axle center to the
/// front-axle center. Callers with image coordinates (y down) flip dy first;
/// see PipelineConfig::y_axis_points_up.
inline double direction_angle(const WheelKeypoints& wheels, bool y_axis_points_up = true) {
    const Point2 back{(wheels.back_left.x + wheels.back_right.x) / 2.0,
                      (wheels.back_left.y + wheels.back_right.y) / 2.0};
    const Point2 front{(wheels.front_left.x + wheels.front_right.x) / 2.0,
                       (wheels.front_left.y + wheels.front_right.y) / 2.0};
    const double dx = front.x - back.x;
    const double dy = (front.y - back.y) * (y_axis_points_up ? 1.0 : -1.0);
    if (dx == 0.0 && dy == 0.0)
        throw ValidationError("direction_angle: coincident axle centers");
    double deg = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
    if (deg < 0.0) deg += 360.0;
    if (deg >= 360.0) deg -= 360.0;
    return deg;
}

/// Orientation bin over eight regions tiling [0, 360): narrow 20-degree
/// regions centered on the axes (indices 0, 2, 4, 6; region 0 wraps at 360)
/// and wide 70-degree regions between them (indices 1, 3, 5, 7).
inline int direction_bin(double theta_deg) {
    double t = std::fmod(theta_deg, 360.0);
    if (t < 0.0) t += 360.0;
    if (t >= 350.0 || t < 10.0) return 0;
    if (t < 80.0) return 1;
    if (t < 100.0) return 2;
    if (t < 170.0) return 3;
    if (t < 190.0) return 4;
    if (t < 260.0) return 5;
    if (t < 280.0) return 6;
    return 7;
}

// ---------------------------------------------------------------------------
// pipeline glue
// ---------------------------------------------------------------------------

/// Compute and store fused features for every trajectory. Metadata tables may
/// be empty (attribute unavailable), in which case that block is skipped.
inline void fuse_trajectories(std::vector<Trajectory>& trajectories,
                              const EmbeddingTable& embeddings,
                              const std::vector<const MetadataTable*>& metadata,
                              const PipelineConfig& config) {
    for (Trajectory& t : trajectories) {
        std::vector<Vec> frames;
        frames.reserve(t.detections.size());
        for (const Detection& d : t.detections) frames.push_back(embeddings.at(key_of(d)));
        const Vec appearance = trajectory_appearance(frames, {}, config.clip_size);

        std::vector<Vec> blocks;
        for (const MetadataTable* table : metadata) {
            if (!table || table->rows.empty()) {
                blocks.push_back({});
                continue;
            }
            std::vector<Vec> probs;
            probs.reserve(t.detections.size());
            for (const Detection& d : t.detections) {
                auto it = table->rows.find(key_of(d));
                if (it == table->rows.end())
                    throw ValidationError("fuse_trajectories: missing " + table->attribute +
                                          " row for a detection");
                probs.push_back(it->second);
            }
            blocks.push_back(metadata_feature(probs));
        }
        while (blocks.size() < 3) blocks.push_back({});
        const FusedFeature f =
            fuse(appearance, blocks[0], blocks[1], blocks[2], config.metadata_weight);
        t.fused_feature = f.full;
    }
}

}  // namespace mtmc
