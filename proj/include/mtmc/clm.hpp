#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "mtmc/config.hpp"
#include "mtmc/io.hpp"
#include "mtmc/types.hpp"

namespace mtmc {

/// Ordered (entry zone, exit zone) combination describing one driving
/// pattern through a camera.
struct ZonePair {
    int camera_id = 0;
    int pair_id = 0;
    int entry_zone_id = 0;
    int exit_zone_id = 0;
};

/// All admissible zone pairs of one camera: entry side from entry or
/// traffic-aware zones, exit side from exit or traffic-aware zones.
inline std::vector<ZonePair> build_zone_pairs(const std::vector<Zone>& zones) {
    std::vector<ZonePair> pairs;
    if (zones.empty()) return pairs;
    const int camera_id = zones.front().camera_id;
    for (const Zone& ze : zones) {
        if (ze.cls != ZoneClass::entry && ze.cls != ZoneClass::traffic_aware) continue;
        for (const Zone& zx : zones) {
            if (zx.cls != ZoneClass::exit && zx.cls != ZoneClass::traffic_aware) continue;
            if (ze.zone_id == zx.zone_id) continue;
            pairs.push_back({camera_id, 0, ze.zone_id, zx.zone_id});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const ZonePair& a, const ZonePair& b) {
        return std::pair(a.entry_zone_id, a.exit_zone_id) <
               std::pair(b.entry_zone_id, b.exit_zone_id);
    });
    for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i].pair_id = static_cast<int>(i) + 1;
    return pairs;
}

// ---------------------------------------------------------------------------
// zone visit profiles
// ---------------------------------------------------------------------------

struct ZoneVisit {
    int zone_id = 0;
    double alpha = 0.0;              // max per-frame overlap / vehicle box area
    std::int64_t first_frame = 0;    // first frame with positive overlap
    std::int64_t last_frame = 0;     // last frame with positive overlap
};

/// Per-trajectory summary of which zones it touched and when. Only the first
/// visit window per zone is kept; re-entries extend [first, last].
struct TrajZoneProfile {
    TrajKey key;
    int pair_id = -1;
    std::vector<ZoneVisit> visits;  // ordered by first_frame
    std::int64_t first_frame = 0;
    std::int64_t last_frame = 0;

    const ZoneVisit* visit_of(int zone_id) const {
        for (const ZoneVisit& v : visits)
            if (v.zone_id == zone_id) return &v;
        return nullptr;
    }
    /// Frame of leaving a zone: last overlap frame, or the trajectory end if
    /// the zone was never touched.
    std::int64_t exit_time(int zone_id) const {
        const ZoneVisit* v = visit_of(zone_id);
        return v ? v->last_frame : last_frame;
    }
    /// Frame of arriving in a zone: first overlap frame, or the trajectory
    /// start if the zone was never touched.
    std::int64_t entry_time(int zone_id) const {
        const ZoneVisit* v = visit_of(zone_id);
        return v ? v->first_frame : first_frame;
    }
};

inline TrajZoneProfile compute_zone_profile(const Trajectory& traj,
                                            const std::vector<Zone>& zones) {
    TrajZoneProfile p;
    p.key = {traj.camera_id, traj.local_id};
    p.first_frame = traj.first_frame();
    p.last_frame = traj.last_frame();
    std::map<int, ZoneVisit> by_zone;
    for (const Detection& d : traj.detections) {
        const double area = d.box.area();
        for (const Zone& z : zones) {
            const double overlap = intersection_area(d.box, z.bbox);
            if (overlap <= 0.0) continue;
            const double alpha = overlap / area;
            auto it = by_zone.find(z.zone_id);
            if (it == by_zone.end()) {
                by_zone[z.zone_id] = {z.zone_id, alpha, d.frame, d.frame};
            } else {
                it->second.alpha = std::max(it->second.alpha, alpha);
                it->second.last_frame = d.frame;
            }
        }
    }
    for (const auto& [zid, v] : by_zone) p.visits.push_back(v);
    std::sort(p.visits.begin(), p.visits.end(), [](const ZoneVisit& a, const ZoneVisit& b) {
        return std::pair(a.first_frame, a.zone_id) < std::pair(b.first_frame, b.zone_id);
    });
    return p;
}

// ---------------------------------------------------------------------------
// zone-pair distance and assignment
// ---------------------------------------------------------------------------

/// Distance between a zone pair P and the ordered zone visits V of a tracked
/// vehicle: sum over z in P union V of |1(z in P) - alpha_z|, infinity when
/// the visit order of P's two zones contradicts V.
inline double zone_pair_distance(const ZonePair& pair, const std::vector<ZoneVisit>& visits) {
    const ZoneVisit* entry_visit = nullptr;
    const ZoneVisit* exit_visit = nullptr;
    double sum = 0.0;
    for (const ZoneVisit& v : visits) {
        if (v.alpha < 0.0 || v.alpha > 1.0)
            throw ValidationError("zone_pair_distance: overlap ratio outside [0,1]");
        const bool in_pair = v.zone_id == pair.entry_zone_id || v.zone_id == pair.exit_zone_id;
        if (v.zone_id == pair.entry_zone_id) entry_visit = &v;
        if (v.zone_id == pair.exit_zone_id) exit_visit = &v;
        sum += std::abs((in_pair ? 1.0 : 0.0) - v.alpha);
    }
    if (entry_visit && exit_visit && entry_visit->first_frame > exit_visit->first_frame)
        return std::numeric_limits<double>::infinity();
    if (!entry_visit) sum += 1.0;  // unvisited pair zone counts with alpha = 0
    if (!exit_visit) sum += 1.0;
    return sum;
}

/// Zone pair with the smallest distance to the trajectory's visits, or -1
/// when every distance is infinite or above `max_pair_distance`. Ties go to
/// the lowest pair id.
inline int assign_zone_pair(const TrajZoneProfile& profile, const std::vector<ZonePair>& pairs,
                            double max_pair_distance) {
    double best = std::numeric_limits<double>::infinity();
    int best_id = -1;
    for (const ZonePair& p : pairs) {
        const double d = zone_pair_distance(p, profile.visits);
        if (d < best) {
            best = d;
            best_id = p.pair_id;
        }
    }
    if (!std::isfinite(best) || best > max_pair_distance) return -1;
    return best_id;
}

// ---------------------------------------------------------------------------
// camera links
// ---------------------------------------------------------------------------

/// Learned transition between a zone pair in a source camera and a zone pair
/// in a destination camera, with its admissible transition-time window.
/// Transition times are destination arrival minus source departure, so
/// forward travel is positive.
struct CameraLink {
    int src_camera = 0;
    int src_pair = 0;
    int src_zone = 0;  // transition zone: exit zone of the source pair
    int dst_camera = 0;
    int dst_pair = 0;
    int dst_zone = 0;  // transition zone: entry zone of the destination pair
    double dt_min = 0.0;
    double dt_max = 0.0;
    int sample_count = 0;
};

struct CameraLinkModel {
    std::map<int, std::vector<Zone>> zones;           // camera_id -> zones
    std::map<int, std::vector<ZonePair>> zone_pairs;  // camera_id -> pairs
    std::vector<CameraLink> links;
    int training_tracks_skipped = 0;

    const ZonePair* find_pair(int camera_id, int pair_id) const {
        auto it = zone_pairs.find(camera_id);
        if (it == zone_pairs.end()) return nullptr;
        for (const ZonePair& p : it->second)
            if (p.pair_id == pair_id) return &p;
        return nullptr;
    }
    const CameraLink* find_link(int src_camera, int src_pair, int dst_camera,
                                int dst_pair) const {
        for (const CameraLink& l : links)
            if (l.src_camera == src_camera && l.src_pair == src_pair &&
                l.dst_camera == dst_camera && l.dst_pair == dst_pair)
                return &l;
        return nullptr;
    }
};

namespace detail {

inline double percentile(std::vector<double> values, double pct) {
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace detail

/// One training observation: a vehicle's per-camera track with its assigned
/// zone pair and visit profile.
struct TrainingTrack {
    int global_id = 0;
    TrajZoneProfile profile;
};

/// Learn camera links and transition-time windows from ground-truth vehicle
/// motion. For every vehicle appearing consecutively in camera s then camera
/// d, the transition time is the frame it enters the destination transition
/// zone minus the frame it leaves the source transition zone; per (source
/// pair, destination pair) group the window is [p_low, p_high] percentiles
/// widened by the padding, kept only with at least `min_link_samples`
/// observations.
inline CameraLinkModel learn_links(const std::vector<TrainingTrack>& tracks,
                                   const std::map<int, std::vector<Zone>>& zones_by_camera,
                                   const std::map<int, std::vector<ZonePair>>& pairs_by_camera,
                                   const PipelineConfig& config) {
    CameraLinkModel model;
    model.zones = zones_by_camera;
    model.zone_pairs = pairs_by_camera;

    std::map<int, std::vector<const TrainingTrack*>> by_vehicle;
    for (const TrainingTrack& t : tracks) {
        if (t.profile.pair_id < 0) {
            ++model.training_tracks_skipped;
            continue;
        }
        by_vehicle[t.global_id].push_back(&t);
    }

    struct LinkKey {
        int sc, sp, dc, dp;
        auto operator<=>(const LinkKey&) const = default;
    };
    std::map<LinkKey, std::vector<double>> samples;

    for (auto& [vehicle, visits] : by_vehicle) {
        std::sort(visits.begin(), visits.end(),
                  [](const TrainingTrack* a, const TrainingTrack* b) {
                      return a->profile.first_frame < b->profile.first_frame;
                  });
        for (std::size_t i = 0; i + 1 < visits.size(); ++i) {
            const TrajZoneProfile& src = visits[i]->profile;
            const TrajZoneProfile& dst = visits[i + 1]->profile;
            if (src.key.camera_id == dst.key.camera_id) continue;
            const ZonePair* sp = nullptr;
            for (const ZonePair& p : pairs_by_camera.at(src.key.camera_id))
                if (p.pair_id == src.pair_id) sp = &p;
            const ZonePair* dp = nullptr;
            for (const ZonePair& p : pairs_by_camera.at(dst.key.camera_id))
                if (p.pair_id == dst.pair_id) dp = &p;
            if (!sp || !dp) continue;
            const double dt = static_cast<double>(dst.entry_time(dp->entry_zone_id) -
                                                  src.exit_time(sp->exit_zone_id));
            samples[{src.key.camera_id, src.pair_id, dst.key.camera_id, dst.pair_id}].push_back(dt);
        }
    }

    for (const auto& [key, dts] : samples) {
        if (static_cast<int>(dts.size()) < config.min_link_samples) continue;
        CameraLink link;
        link.src_camera = key.sc;
        link.src_pair = key.sp;
        link.dst_camera = key.dc;
        link.dst_pair = key.dp;
        link.src_zone = model.find_pair(key.sc, key.sp)->exit_zone_id;
        link.dst_zone = model.find_pair(key.dc, key.dp)->entry_zone_id;
        link.dt_min = detail::percentile(dts, config.window_percentile_low) -
                      config.window_padding_frames;
        link.dt_max = detail::percentile(dts, config.window_percentile_high) +
                      config.window_padding_frames;
        link.sample_count = static_cast<int>(dts.size());
        model.links.push_back(link);
    }
    return model;
}

/// Transition time from `src` to `dst` along `link`: destination entry-zone
/// arrival minus source exit-zone departure.
inline double transition_time(const TrajZoneProfile& src, const TrajZoneProfile& dst,
                              const CameraLink& link) {
    return static_cast<double>(dst.entry_time(link.dst_zone) - src.exit_time(link.src_zone));
}

/// True when a learned link joins the two assigned zone pairs and the
/// observed transition time falls inside its window.
inline bool valid_transition(const TrajZoneProfile& src, const TrajZoneProfile& dst,
                             const CameraLinkModel& model) {
    if (src.pair_id < 0 || dst.pair_id < 0) return false;
    const CameraLink* link =
        model.find_link(src.key.camera_id, src.pair_id, dst.key.camera_id, dst.pair_id);
    if (!link) return false;
    const double dt = transition_time(src, dst, *link);
    return dt >= link->dt_min && dt <= link->dt_max;
}

/// A cross-camera match annotated with its transition-zone crossing frames.
struct LinkMatch {
    std::int64_t src_time = 0;  // source exit-zone crossing
    std::int64_t dst_time = 0;  // destination entry-zone crossing
};

/// Vehicles on the same link must keep their order: the sign of the source
/// time difference has to equal the sign of the destination time difference.
inline bool order_consistent(const LinkMatch& a, const LinkMatch& b) {
    auto sgn = [](std::int64_t v) { return (v > 0) - (v < 0); };
    return sgn(a.src_time - b.src_time) == sgn(a.dst_time - b.dst_time);
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

inline nlohmann::json clm_to_json(const CameraLinkModel& model) {
    nlohmann::json cams = nlohmann::json::array();
    for (const auto& [cam, zones] : model.zones) {
        nlohmann::json jz = nlohmann::json::array();
        for (const Zone& z : zones)
            jz.push_back({{"zone_id", z.zone_id},
                          {"class", to_string(z.cls)},
                          {"x", z.bbox.x},
                          {"y", z.bbox.y},
                          {"w", z.bbox.w},
                          {"h", z.bbox.h},
                          {"n_entry", z.n_entry},
                          {"n_exit", z.n_exit}});
        nlohmann::json jp = nlohmann::json::array();
        auto pit = model.zone_pairs.find(cam);
        if (pit != model.zone_pairs.end())
            for (const ZonePair& p : pit->second)
                jp.push_back({{"pair_id", p.pair_id},
                              {"entry_zone_id", p.entry_zone_id},
                              {"exit_zone_id", p.exit_zone_id}});
        cams.push_back({{"camera_id", cam}, {"zones", jz}, {"zone_pairs", jp}});
    }
    nlohmann::json jl = nlohmann::json::array();
    for (const CameraLink& l : model.links)
        jl.push_back({{"src_camera", l.src_camera},
                      {"src_pair", l.src_pair},
                      {"src_zone", l.src_zone},
                      {"dst_camera", l.dst_camera},
                      {"dst_pair", l.dst_pair},
                      {"dst_zone", l.dst_zone},
                      {"dt_min", l.dt_min},
                      {"dt_max", l.dt_max},
                      {"sample_count", l.sample_count}});
    return {{"cameras", cams},
            {"links", jl},
            {"training_tracks_skipped", model.training_tracks_skipped}};
}

inline CameraLinkModel clm_from_json(const nlohmann::json& j) {
    CameraLinkModel model;
    for (const auto& jc : j.at("cameras")) {
        const int cam = jc.at("camera_id").get<int>();
        for (const auto& jz : jc.at("zones")) {
            Zone z;
            z.camera_id = cam;
            z.zone_id = jz.at("zone_id").get<int>();
            z.cls = zone_class_from_string(jz.at("class").get<std::string>());
            z.bbox = {jz.at("x").get<double>(), jz.at("y").get<double>(),
                      jz.at("w").get<double>(), jz.at("h").get<double>()};
            z.n_entry = jz.at("n_entry").get<int>();
            z.n_exit = jz.at("n_exit").get<int>();
            model.zones[cam].push_back(z);
        }
        for (const auto& jp : jc.at("zone_pairs")) {
            ZonePair p;
            p.camera_id = cam;
            p.pair_id = jp.at("pair_id").get<int>();
            p.entry_zone_id = jp.at("entry_zone_id").get<int>();
            p.exit_zone_id = jp.at("exit_zone_id").get<int>();
            model.zone_pairs[cam].push_back(p);
        }
    }
    for (const auto& jl : j.at("links")) {
        CameraLink l;
        l.src_camera = jl.at("src_camera").get<int>();
        l.src_pair = jl.at("src_pair").get<int>();
        l.src_zone = jl.at("src_zone").get<int>();
        l.dst_camera = jl.at("dst_camera").get<int>();
        l.dst_pair = jl.at("dst_pair").get<int>();
        l.dst_zone = jl.at("dst_zone").get<int>();
        l.dt_min = jl.at("dt_min").get<double>();
        l.dt_max = jl.at("dt_max").get<double>();
        l.sample_count = jl.at("sample_count").get<int>();
        model.links.push_back(l);
    }
    if (j.contains("training_tracks_skipped"))
        model.training_tracks_skipped = j.at("training_tracks_skipped").get<int>();
    // duplicate (source pair, destination pair) links are a model corruption
    for (std::size_t i = 0; i < model.links.size(); ++i)
        for (std::size_t k = i + 1; k < model.links.size(); ++k) {
            const CameraLink &a = model.links[i], &b = model.links[k];
            if (a.src_camera == b.src_camera && a.src_pair == b.src_pair &&
                a.dst_camera == b.dst_camera && a.dst_pair == b.dst_pair)
                throw ValidationError("camera link model: duplicate link for pair combination");
        }
    return model;
}

}  // namespace mtmc
