#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtmc/errors.hpp"
#include "mtmc/geometry.hpp"
#include "mtmc/vecmath.hpp"

namespace mtmc {

/// One bounding-box observation in one camera frame.
struct Detection {
    int camera_id = 0;
    std::int64_t frame = 0;  // global synchronized frame index
    int det_index = 0;       // unique within (camera, frame)
    Box box;
    double confidence = 1.0;
};

/// Key identifying a detection across the sidecar tables.
struct DetKey {
    int camera_id = 0;
    std::int64_t frame = 0;
    int det_index = 0;

    friend bool operator==(const DetKey&, const DetKey&) = default;
    friend auto operator<=>(const DetKey&, const DetKey&) = default;
};

inline DetKey key_of(const Detection& d) { return {d.camera_id, d.frame, d.det_index}; }

struct DetKeyHash {
    std::size_t operator()(const DetKey& k) const {
        std::size_t h = std::hash<std::int64_t>()(k.frame);
        h ^= std::hash<int>()(k.camera_id) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h ^= std::hash<int>()(k.det_index) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

/// Per-detection appearance vectors, all of one fixed dimension.
struct EmbeddingTable {
    int dim = 0;
    std::unordered_map<DetKey, Vec, DetKeyHash> rows;

    const Vec& at(const DetKey& k) const {
        auto it = rows.find(k);
        if (it == rows.end())
            throw ValidationError("no embedding for detection (camera " +
                                  std::to_string(k.camera_id) + ", frame " +
                                  std::to_string(k.frame) + ", det " +
                                  std::to_string(k.det_index) + ")");
        return it->second;
    }
};

/// Per-detection class-probability vectors for one metadata attribute.
struct MetadataTable {
    std::string attribute;  // "type", "brand" or "color"
    int class_count = 0;
    std::unordered_map<DetKey, Vec, DetKeyHash> rows;
};

/// Short frame-to-frame association fragment; vertices of the tracklet graph.
struct Tracklet {
    int camera_id = 0;
    std::vector<Detection> detections;  // frames strictly increasing
    Vec mean_embedding;

    std::int64_t first_frame() const { return detections.front().frame; }
    std::int64_t last_frame() const { return detections.back().frame; }
    const Box& first_box() const { return detections.front().box; }
    const Box& last_box() const { return detections.back().box; }
};

/// Complete per-camera track for one local identity.
struct Trajectory {
    int camera_id = 0;
    int local_id = 0;
    std::vector<Detection> detections;  // frames strictly increasing
    Vec fused_feature;                  // empty until fusion runs
    int zone_pair_id = -1;              // -1 = unassigned

    std::int64_t first_frame() const { return detections.front().frame; }
    std::int64_t last_frame() const { return detections.back().frame; }
    Point2 entry_point() const { return detections.front().box.center(); }
    Point2 exit_point() const { return detections.back().box.center(); }
    bool overlaps_in_time(const Trajectory& o) const {
        return first_frame() <= o.last_frame() && o.first_frame() <= last_frame();
    }
};

/// Identifier of a trajectory across cameras.
struct TrajKey {
    int camera_id = 0;
    int local_id = 0;

    friend bool operator==(const TrajKey&, const TrajKey&) = default;
    friend auto operator<=>(const TrajKey&, const TrajKey&) = default;
};

enum class ZoneClass { entry, exit, traffic_aware, dont_care };

inline const char* to_string(ZoneClass c) {
    switch (c) {
        case ZoneClass::entry: return "entry";
        case ZoneClass::exit: return "exit";
        case ZoneClass::traffic_aware: return "traffic_aware";
        case ZoneClass::dont_care: return "dont_care";
    }
    return "dont_care";
}

inline ZoneClass zone_class_from_string(const std::string& s) {
    if (s == "entry") return ZoneClass::entry;
    if (s == "exit") return ZoneClass::exit;
    if (s == "traffic_aware") return ZoneClass::traffic_aware;
    if (s == "dont_care") return ZoneClass::dont_care;
    throw ValidationError("unknown zone class '" + s + "'");
}

/// Image-space region where trajectories begin, end or pause.
struct Zone {
    int camera_id = 0;
    int zone_id = 0;
    Box bbox;
    int n_entry = 0;
    int n_exit = 0;
    ZoneClass cls = ZoneClass::dont_care;
};

/// Trajectory endpoint fed to zone inference.
struct EndpointSample {
    Point2 point;
    enum class Kind { entry, exit } kind = Kind::entry;
    TrajKey trajectory_ref;
};

}  // namespace mtmc
