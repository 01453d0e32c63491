#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <vector>

#include "mtmc/config.hpp"
#include "mtmc/meanshift.hpp"
#include "mtmc/types.hpp"

namespace mtmc {

/// Zone class from entry/exit point counts, evaluated in the fixed order
/// entry, exit, traffic-aware. D_e + D_x = 1 and D_ta = 1 - |Ne-Nx|/(Ne+Nx).
inline ZoneClass classify_zone(int n_entry, int n_exit, const PipelineConfig& config) {
    if (n_entry < 0 || n_exit < 0 || n_entry + n_exit == 0)
        throw ValidationError("classify_zone: needs a positive point count");
    const double total = static_cast<double>(n_entry + n_exit);
    const double d_entry = n_entry / total;
    const double d_exit = n_exit / total;
    const double d_traffic = 1.0 - std::abs(n_entry - n_exit) / total;
    if (d_entry > config.rho_entry) return ZoneClass::entry;
    if (d_exit > config.rho_exit) return ZoneClass::exit;
    if (d_traffic > config.rho_traffic) return ZoneClass::traffic_aware;
    return ZoneClass::dont_care;
}

inline std::vector<EndpointSample> trajectory_endpoints(const std::vector<Trajectory>& trajs) {
    std::vector<EndpointSample> samples;
    for (const Trajectory& t : trajs) {
        samples.push_back({t.entry_point(), EndpointSample::Kind::entry, {t.camera_id, t.local_id}});
        samples.push_back({t.exit_point(), EndpointSample::Kind::exit, {t.camera_id, t.local_id}});
    }
    return samples;
}

inline double mean_box_area(const std::vector<Trajectory>& trajs) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const Trajectory& t : trajs)
        for (const Detection& d : t.detections) {
            sum += d.box.area();
            ++n;
        }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

/// MeanShift over trajectory endpoints, one zone per surviving cluster.
/// Clusters with fewer than `min_zone_points` members are dropped.
inline std::vector<Zone> build_zones(const std::vector<Trajectory>& trajectories,
                                     const PipelineConfig& config) {
    std::vector<Zone> zones;
    if (trajectories.empty()) return zones;
    const int camera_id = trajectories.front().camera_id;

    const auto samples = trajectory_endpoints(trajectories);
    std::vector<Point2> points;
    points.reserve(samples.size());
    for (const auto& s : samples) points.push_back(s.point);

    const MeanShiftResult ms = mean_shift(points, config.bandwidth);

    std::map<int, std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < samples.size(); ++i) clusters[ms.assignment[i]].push_back(i);

    for (const auto& [mode, member_idx] : clusters) {
        if (static_cast<int>(member_idx.size()) < config.min_zone_points) continue;
        Zone z;
        z.camera_id = camera_id;
        Box bbox{points[member_idx[0]].x, points[member_idx[0]].y, 0.0, 0.0};
        for (std::size_t i : member_idx) {
            const Point2& p = points[i];
            const double x0 = std::min(bbox.x, p.x), y0 = std::min(bbox.y, p.y);
            const double x1 = std::max(bbox.right(), p.x), y1 = std::max(bbox.bottom(), p.y);
            bbox = {x0, y0, x1 - x0, y1 - y0};
            if (samples[i].kind == EndpointSample::Kind::entry)
                ++z.n_entry;
            else
                ++z.n_exit;
        }
        z.bbox = bbox;
        z.cls = classify_zone(z.n_entry, z.n_exit, config);
        zones.push_back(z);
    }

    std::sort(zones.begin(), zones.end(), [](const Zone& a, const Zone& b) {
        return std::tuple(a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h) <
               std::tuple(b.bbox.x, b.bbox.y, b.bbox.w, b.bbox.h);
    });
    for (std::size_t i = 0; i < zones.size(); ++i) zones[i].zone_id = static_cast<int>(i) + 1;
    return zones;
}

// ---------------------------------------------------------------------------
// isolated-trajectory reconnection
// ---------------------------------------------------------------------------

struct MergeEvent {
    int zone_id = 0;
    int head_local_id = 0;  // trajectory that vanished in the zone
    int tail_local_id = 0;  // trajectory that reappeared and was absorbed
    std::int64_t exit_frame = 0;
    std::int64_t entry_frame = 0;
};

struct ReconnectResult {
    std::vector<Trajectory> trajectories;
    std::vector<MergeEvent> merges;
};

namespace detail {

/// Traffic-aware zone a box belongs to, largest overlap first. Zones smaller
/// than `min_zone_area` are unreliable for reconnection and never match.
inline const Zone* containing_traffic_zone(const Box& box, const std::vector<Zone>& zones,
                                           double min_zone_area) {
    const Zone* best = nullptr;
    double best_area = 0.0;
    for (const Zone& z : zones) {
        if (z.cls != ZoneClass::traffic_aware) continue;
        if (z.bbox.area() < min_zone_area) continue;
        const double a = intersection_area(box, z.bbox);
        if (a > best_area) {
            best_area = a;
            best = &z;
        }
    }
    return best;
}

}  // namespace detail

/// FIFO reconnection of trajectories that vanish and reappear inside
/// traffic-aware zones. A trajectory ending in a zone joins that zone's
/// queue; a trajectory later starting in the zone is merged with the queue
/// head when the head's last box overlaps its first box (IOU at least
/// `iou_reconnect_threshold`) and their mean embeddings agree (cosine at
/// least `appearance_reconnect_threshold`). A failed head stays queued;
/// heads older than `reconnect_ttl_frames` are evicted. The merged
/// trajectory keeps the earlier local id. Traffic-aware zones smaller than
/// `traffic_zone_area_factor` times the mean vehicle box area are ignored.
inline ReconnectResult reconnect_isolated(const std::vector<Trajectory>& trajectories,
                                          const std::vector<Zone>& zones,
                                          const EmbeddingTable& embeddings,
                                          const PipelineConfig& config) {
    struct Node {
        Trajectory traj;
        Vec emb_sum;
        int rep;  // union-find style parent; own index when live
    };
    std::vector<Node> nodes;
    nodes.reserve(trajectories.size());
    for (const Trajectory& t : trajectories) {
        Node n;
        n.traj = t;
        for (const Detection& d : t.detections) add_in_place(n.emb_sum, embeddings.at(key_of(d)));
        n.rep = static_cast<int>(nodes.size());
        nodes.push_back(std::move(n));
    }
    auto find = [&](int i) {
        while (nodes[i].rep != i) i = nodes[i].rep;
        return i;
    };
    auto mean_emb = [&](int i) {
        Vec m = nodes[i].emb_sum;
        for (double& v : m) v /= static_cast<double>(nodes[i].traj.detections.size());
        return m;
    };

    struct Event {
        std::int64_t frame;
        int type;  // 0 = trajectory end, 1 = trajectory start
        int node;
        int zone_id;
    };
    const double min_zone_area = config.traffic_zone_area_factor * mean_box_area(trajectories);
    std::vector<Event> events;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Trajectory& t = nodes[i].traj;
        // detector blips would clog the queues as permanently failing heads
        if (static_cast<int>(t.detections.size()) < config.reconnect_min_track_frames) continue;
        if (const Zone* z = detail::containing_traffic_zone(t.detections.back().box, zones,
                                                            min_zone_area))
            events.push_back({t.last_frame(), 0, static_cast<int>(i), z->zone_id});
        if (const Zone* z = detail::containing_traffic_zone(t.detections.front().box, zones,
                                                            min_zone_area))
            events.push_back({t.first_frame(), 1, static_cast<int>(i), z->zone_id});
    }
    std::sort(events.begin(), events.end(), [&](const Event& a, const Event& b) {
        return std::tuple(a.frame, a.type, nodes[a.node].traj.local_id) <
               std::tuple(b.frame, b.type, nodes[b.node].traj.local_id);
    });

    struct Waiting {
        int node;
        std::int64_t end_frame;  // queue entry is stale once the node grew past this
    };
    std::map<int, std::deque<Waiting>> queues;  // zone_id -> FIFO of ended trajectories
    ReconnectResult result;

    auto drop_unusable = [&](std::deque<Waiting>& queue, std::int64_t now) {
        while (!queue.empty()) {
            const Waiting& w = queue.front();
            const bool stale = nodes[find(w.node)].traj.last_frame() != w.end_frame;
            const bool expired = w.end_frame < now - config.reconnect_ttl_frames;
            if (!stale && !expired) break;
            queue.pop_front();
        }
    };

    for (const Event& ev : events) {
        auto& queue = queues[ev.zone_id];
        drop_unusable(queue, ev.frame);

        if (ev.type == 0) {
            const int rep = find(ev.node);
            // stale end events (the node was absorbed and its frames moved
            // into the representative) still describe the representative end
            if (nodes[rep].traj.last_frame() == ev.frame) queue.push_back({rep, ev.frame});
            continue;
        }

        const int tail = find(ev.node);
        if (queue.empty()) continue;
        const int head = find(queue.front().node);
        if (head == tail) continue;
        const Trajectory& ht = nodes[head].traj;
        const Trajectory& tt = nodes[tail].traj;
        if (ht.last_frame() >= tt.first_frame()) continue;  // would break frame order
        if (iou(ht.detections.back().box, tt.detections.front().box) < config.iou_reconnect_threshold)
            continue;
        if (cosine_similarity(mean_emb(head), mean_emb(tail)) < config.appearance_reconnect_threshold)
            continue;

        queue.pop_front();
        result.merges.push_back({ev.zone_id, ht.local_id, tt.local_id, ht.last_frame(),
                                 tt.first_frame()});
        nodes[head].traj.detections.insert(nodes[head].traj.detections.end(),
                                           tt.detections.begin(), tt.detections.end());
        add_in_place(nodes[head].emb_sum, nodes[tail].emb_sum);
        nodes[tail].rep = head;
    }

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].rep != static_cast<int>(i)) continue;
        result.trajectories.push_back(std::move(nodes[i].traj));
    }
    std::sort(result.trajectories.begin(), result.trajectories.end(),
              [](const Trajectory& a, const Trajectory& b) {
                  return std::pair(a.first_frame(), a.detections.front().det_index) <
                         std::pair(b.first_frame(), b.detections.front().det_index);
              });
    return result;
}

}  // namespace mtmc
