#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <tuple>
#include <vector>

#include "mtmc/config.hpp"
#include "mtmc/types.hpp"

namespace mtmc {

// ---------------------------------------------------------------------------
// frame-to-frame association
// ---------------------------------------------------------------------------

/// Greedy per-frame bipartite matching of detections onto open tracklets.
/// Score is the even blend of box IOU and embedding cosine similarity;
/// candidates whose IOU falls below `iou_assoc_threshold` are never matched.
/// A tracklet left unmatched for more than `assoc_gap_frames` frames closes.
inline std::vector<Tracklet> associate_detections(const std::vector<Detection>& detections,
                                                  const EmbeddingTable& embeddings,
                                                  const PipelineConfig& config) {
    struct Open {
        std::vector<Detection> dets;
        Vec emb_sum;
        int tracklet_index;  // creation order, used for deterministic ties
    };

    std::vector<Tracklet> done;
    std::vector<Open> open;
    int created = 0;

    auto close = [&](Open& o) {
        Tracklet t;
        t.camera_id = o.dets.front().camera_id;
        t.detections = std::move(o.dets);
        t.mean_embedding = o.emb_sum;
        for (double& v : t.mean_embedding) v /= static_cast<double>(t.detections.size());
        done.push_back(std::move(t));
    };

    std::size_t i = 0;
    while (i < detections.size()) {
        const std::int64_t frame = detections[i].frame;
        std::size_t j = i;
        while (j < detections.size() && detections[j].frame == frame) ++j;

        // retire tracklets that have been silent too long
        std::vector<Open> still_open;
        for (Open& o : open) {
            if (frame - o.dets.back().frame - 1 > config.assoc_gap_frames)
                close(o);
            else
                still_open.push_back(std::move(o));
        }
        open = std::move(still_open);

        struct Cand {
            double score;
            std::size_t open_idx;
            std::size_t det_idx;  // index into [i, j)
        };
        std::vector<Cand> cands;
        for (std::size_t oi = 0; oi < open.size(); ++oi) {
            Vec mean = open[oi].emb_sum;
            for (double& v : mean) v /= static_cast<double>(open[oi].dets.size());
            for (std::size_t di = i; di < j; ++di) {
                const double box_iou = iou(open[oi].dets.back().box, detections[di].box);
                if (box_iou < config.iou_assoc_threshold) continue;
                const double sim = cosine_similarity(mean, embeddings.at(key_of(detections[di])));
                cands.push_back({0.5 * box_iou + 0.5 * sim, oi, di});
            }
        }
        std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
            if (a.score != b.score) return a.score > b.score;
            return std::pair(open[a.open_idx].tracklet_index, detections[a.det_idx].det_index) <
                   std::pair(open[b.open_idx].tracklet_index, detections[b.det_idx].det_index);
        });

        std::vector<bool> open_used(open.size(), false), det_used(j - i, false);
        for (const Cand& c : cands) {
            if (open_used[c.open_idx] || det_used[c.det_idx - i]) continue;
            open_used[c.open_idx] = true;
            det_used[c.det_idx - i] = true;
            open[c.open_idx].dets.push_back(detections[c.det_idx]);
            add_in_place(open[c.open_idx].emb_sum, embeddings.at(key_of(detections[c.det_idx])));
        }
        for (std::size_t di = i; di < j; ++di) {
            if (det_used[di - i]) continue;
            Open o;
            o.dets.push_back(detections[di]);
            add_in_place(o.emb_sum, embeddings.at(key_of(detections[di])));
            o.tracklet_index = created++;
            open.push_back(std::move(o));
        }
        i = j;
    }
    for (Open& o : open) close(o);

    std::sort(done.begin(), done.end(), [](const Tracklet& a, const Tracklet& b) {
        return std::pair(a.first_frame(), a.detections.front().det_index) <
               std::pair(b.first_frame(), b.detections.front().det_index);
    });
    return done;
}

// ---------------------------------------------------------------------------
// tracklet graph edges
// ---------------------------------------------------------------------------

/// Average per-frame velocity of a tracklet's box center; zero for singletons.
inline Point2 mean_velocity(const Tracklet& t) {
    if (t.detections.size() < 2) return {0.0, 0.0};
    const Point2 a = t.first_box().center();
    const Point2 b = t.last_box().center();
    const double dt = static_cast<double>(t.last_frame() - t.first_frame());
    return {(b.x - a.x) / dt, (b.y - a.y) / dt};
}

/// `t1`'s last box carried forward to `frame` under constant velocity.
inline Box extrapolate_box(const Tracklet& t1, std::int64_t frame) {
    const Point2 v = mean_velocity(t1);
    const double dt = static_cast<double>(frame - t1.last_frame());
    Box b = t1.last_box();
    b.x += v.x * dt;
    b.y += v.y * dt;
    return b;
}

/// Deterministic replacement for a learned tracklet-affinity model: blends
/// appearance dissimilarity, the normalized frame gap and a constant-velocity
/// motion consistency term. The gap counts frames skipped between t1's last
/// and t2's first detection; gaps beyond `tracklet_gap_max` (or temporal
/// overlap) make the pair incompatible.
inline std::optional<double> tracklet_edge_cost(const Tracklet& t1, const Tracklet& t2,
                                                const PipelineConfig& config) {
    const std::int64_t gap = t2.first_frame() - t1.last_frame() - 1;
    if (gap < 0) return std::nullopt;  // overlap or wrong order
    if (gap > config.tracklet_gap_max) return std::nullopt;

    const double appearance = 1.0 - cosine_similarity(t1.mean_embedding, t2.mean_embedding);
    const double time = static_cast<double>(gap) / static_cast<double>(config.tracklet_gap_max);
    const double motion = 1.0 - iou(extrapolate_box(t1, t2.first_frame()), t2.first_box());
    return config.edge_weight_appearance * appearance + config.edge_weight_time * time +
           config.edge_weight_motion * motion;
}

// ---------------------------------------------------------------------------
// tracklet clustering
// ---------------------------------------------------------------------------

namespace detail {

/// Merge candidate groups treated as super-tracklets in temporal order.
inline Tracklet as_super_tracklet(const std::vector<const Tracklet*>& members) {
    Tracklet t;
    t.camera_id = members.front()->camera_id;
    std::size_t total = 0;
    for (const Tracklet* m : members) {
        t.detections.insert(t.detections.end(), m->detections.begin(), m->detections.end());
        add_in_place(t.mean_embedding, m->mean_embedding,
                     static_cast<double>(m->detections.size()));
        total += m->detections.size();
    }
    std::sort(t.detections.begin(), t.detections.end(),
              [](const Detection& a, const Detection& b) { return a.frame < b.frame; });
    for (double& v : t.mean_embedding) v /= static_cast<double>(total);
    return t;
}

inline std::optional<double> group_edge_cost(const Tracklet& a, const Tracklet& b,
                                             const PipelineConfig& config) {
    if (a.last_frame() < b.first_frame()) return tracklet_edge_cost(a, b, config);
    if (b.last_frame() < a.first_frame()) return tracklet_edge_cost(b, a, config);
    return std::nullopt;
}

}  // namespace detail

/// Greedy agglomerative merging in ascending edge cost until no compatible
/// pair stays below `tracklet_merge_threshold`. Every input detection ends up
/// in exactly one trajectory; local ids follow (first frame, det_index) order.
inline std::vector<Trajectory> cluster_tracklets(const std::vector<Tracklet>& tracklets,
                                                 const PipelineConfig& config) {
    struct Group {
        std::vector<const Tracklet*> members;
        Tracklet merged;
        bool alive = true;
    };
    std::vector<Group> groups;
    for (const Tracklet& t : tracklets) groups.push_back({{&t}, t, true});

    auto cost_between = [&](const Group& a, const Group& b) {
        return detail::group_edge_cost(a.merged, b.merged, config);
    };

    while (true) {
        double best = std::numeric_limits<double>::infinity();
        int bi = -1, bj = -1;
        for (std::size_t a = 0; a < groups.size(); ++a) {
            if (!groups[a].alive) continue;
            for (std::size_t b = a + 1; b < groups.size(); ++b) {
                if (!groups[b].alive) continue;
                const auto c = cost_between(groups[a], groups[b]);
                if (!c || *c >= config.tracklet_merge_threshold) continue;
                if (*c < best) {
                    best = *c;
                    bi = static_cast<int>(a);
                    bj = static_cast<int>(b);
                }
            }
        }
        if (bi < 0) break;
        Group& dst = groups[bi];
        Group& src = groups[bj];
        dst.members.insert(dst.members.end(), src.members.begin(), src.members.end());
        dst.merged = detail::as_super_tracklet(dst.members);
        src.alive = false;
    }

    std::vector<Trajectory> out;
    for (Group& g : groups) {
        if (!g.alive) continue;
        Trajectory t;
        t.camera_id = g.merged.camera_id;
        t.detections = std::move(g.merged.detections);
        out.push_back(std::move(t));
    }
    std::sort(out.begin(), out.end(), [](const Trajectory& a, const Trajectory& b) {
        return std::pair(a.first_frame(), a.detections.front().det_index) <
               std::pair(b.first_frame(), b.detections.front().det_index);
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].local_id = static_cast<int>(i) + 1;
    return out;
}

}  // namespace mtmc
