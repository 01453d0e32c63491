#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtmc/io.hpp"
#include "mtmc/types.hpp"

namespace mtmc::synth {

// ---------------------------------------------------------------------------
// scenario specification
// ---------------------------------------------------------------------------

struct CameraSpec {
    int camera_id = 0;
    Box fov;  // world-plane rectangle
    double image_scale_x = 1.0;
    double image_scale_y = 1.0;
};

struct StopSpec {
    double s = 0.0;            // arc position along the road
    std::int64_t duration = 0; // frames the vehicle stays hidden
    int spread = 4;            // queue slots; vehicle v halts at s - (v % spread) * gap
};

struct NoiseSpec {
    double sigma_box = 0.0;
    double miss_rate = 0.0;
    double fp_rate = 0.0;
    double sigma_emb = 0.0;
    double meta_flip_rate = 0.0;
};

struct ScenarioSpec {
    std::uint64_t seed = 0;
    int embedding_dim = 16;
    std::map<std::string, int> metadata_classes{{"type", 4}, {"brand", 6}, {"color", 5}};
    std::optional<Box> world;  // when set, every FOV must lie inside it
    std::vector<CameraSpec> cameras;
    std::vector<Point2> road;  // polyline in world coordinates
    std::vector<double> lane_offsets{0.0};
    // vehicles drift slowly inside their lane: a per-vehicle sinusoid with
    // amplitude up to lane_jitter and period lane_wavelength (world units)
    double lane_jitter = 8.0;
    double lane_wavelength = 1600.0;
    int vehicle_count = 1;
    double speed_min = 9.0;
    double speed_max = 11.0;
    std::int64_t depart_every = 60;
    double vehicle_length = 30.0;
    double vehicle_width = 16.0;
    int vehicle_models = 0;  // 0: every vehicle gets its own latent feature
    // per (vehicle, camera) frames clipped off either end of the visible
    // interval, drawn uniformly from [0, visibility_skip_max]; models the
    // varying pickup/dropout depth of a detector and spreads the trajectory
    // endpoints that zone inference clusters
    int visibility_skip_max = 2;
    std::vector<StopSpec> stops;
    NoiseSpec noise;

    void validate() const {
        if (cameras.empty()) throw ValidationError("scenario: needs at least one camera");
        if (road.size() < 2) throw ValidationError("scenario: road needs at least two points");
        if (vehicle_count < 1) throw ValidationError("scenario: vehicle_count must be >= 1");
        if (speed_min <= 0.0 || speed_max < speed_min)
            throw ValidationError("scenario: need 0 < speed_min <= speed_max");
        if (embedding_dim < 1) throw ValidationError("scenario: embedding_dim must be >= 1");
        if (lane_offsets.empty()) throw ValidationError("scenario: needs at least one lane");
        for (double r : {noise.miss_rate, noise.fp_rate, noise.meta_flip_rate})
            if (r < 0.0 || r > 1.0) throw ValidationError("scenario: rates must be in [0,1]");
        if (noise.sigma_box < 0.0 || noise.sigma_emb < 0.0)
            throw ValidationError("scenario: noise sigmas must be >= 0");
        if (visibility_skip_max < 0)
            throw ValidationError("scenario: visibility_skip_max must be >= 0");
        if (lane_jitter < 0.0) throw ValidationError("scenario: lane_jitter must be >= 0");
        if (lane_wavelength <= 0.0)
            throw ValidationError("scenario: lane_wavelength must be > 0");
        if (world) {
            for (const CameraSpec& c : cameras) {
                if (c.fov.x < world->x || c.fov.y < world->y ||
                    c.fov.right() > world->right() || c.fov.bottom() > world->bottom())
                    throw ValidationError("scenario: camera " + std::to_string(c.camera_id) +
                                          " FOV lies outside the world plane");
            }
        }
    }
};

inline ScenarioSpec scenario_from_json(const nlohmann::json& j) {
    ScenarioSpec s;
    auto box_from = [](const nlohmann::json& b) {
        return Box{b.at("x").get<double>(), b.at("y").get<double>(), b.at("w").get<double>(),
                   b.at("h").get<double>()};
    };
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("embedding_dim")) s.embedding_dim = j.at("embedding_dim").get<int>();
    if (j.contains("metadata_classes")) {
        s.metadata_classes.clear();
        for (auto it = j.at("metadata_classes").begin(); it != j.at("metadata_classes").end(); ++it)
            s.metadata_classes[it.key()] = it.value().get<int>();
    }
    if (j.contains("world")) s.world = box_from(j.at("world"));
    for (const auto& jc : j.at("cameras")) {
        CameraSpec c;
        c.camera_id = jc.at("camera_id").get<int>();
        c.fov = box_from(jc.at("fov"));
        if (jc.contains("image_scale_x")) c.image_scale_x = jc.at("image_scale_x").get<double>();
        if (jc.contains("image_scale_y")) c.image_scale_y = jc.at("image_scale_y").get<double>();
        s.cameras.push_back(c);
    }
    s.road.clear();
    for (const auto& jp : j.at("road")) s.road.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
    if (j.contains("lane_offsets")) {
        s.lane_offsets.clear();
        for (const auto& v : j.at("lane_offsets")) s.lane_offsets.push_back(v.get<double>());
    }
    if (j.contains("lane_jitter")) s.lane_jitter = j.at("lane_jitter").get<double>();
    if (j.contains("lane_wavelength")) s.lane_wavelength = j.at("lane_wavelength").get<double>();
    const auto& jv = j.at("vehicles");
    s.vehicle_count = jv.at("count").get<int>();
    if (jv.contains("speed_min")) s.speed_min = jv.at("speed_min").get<double>();
    if (jv.contains("speed_max")) s.speed_max = jv.at("speed_max").get<double>();
    if (jv.contains("depart_every")) s.depart_every = jv.at("depart_every").get<std::int64_t>();
    if (jv.contains("length")) s.vehicle_length = jv.at("length").get<double>();
    if (jv.contains("width")) s.vehicle_width = jv.at("width").get<double>();
    if (jv.contains("models")) s.vehicle_models = jv.at("models").get<int>();
    if (j.contains("visibility_skip_max"))
        s.visibility_skip_max = j.at("visibility_skip_max").get<int>();
    if (j.contains("stops"))
        for (const auto& js : j.at("stops")) {
            StopSpec st;
            st.s = js.at("s").get<double>();
            st.duration = js.at("duration").get<std::int64_t>();
            if (js.contains("spread")) st.spread = js.at("spread").get<int>();
            s.stops.push_back(st);
        }
    if (j.contains("noise")) {
        const auto& jn = j.at("noise");
        if (jn.contains("sigma_box")) s.noise.sigma_box = jn.at("sigma_box").get<double>();
        if (jn.contains("miss_rate")) s.noise.miss_rate = jn.at("miss_rate").get<double>();
        if (jn.contains("fp_rate")) s.noise.fp_rate = jn.at("fp_rate").get<double>();
        if (jn.contains("sigma_emb")) s.noise.sigma_emb = jn.at("sigma_emb").get<double>();
        if (jn.contains("meta_flip_rate"))
            s.noise.meta_flip_rate = jn.at("meta_flip_rate").get<double>();
    }
    s.validate();
    return s;
}

inline nlohmann::json scenario_to_json(const ScenarioSpec& s) {
    auto box_json = [](const Box& b) {
        return nlohmann::json{{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
    };
    nlohmann::json j;
    j["seed"] = s.seed;
    j["embedding_dim"] = s.embedding_dim;
    j["metadata_classes"] = s.metadata_classes;
    if (s.world) j["world"] = box_json(*s.world);
    j["cameras"] = nlohmann::json::array();
    for (const CameraSpec& c : s.cameras)
        j["cameras"].push_back({{"camera_id", c.camera_id},
                                {"fov", box_json(c.fov)},
                                {"image_scale_x", c.image_scale_x},
                                {"image_scale_y", c.image_scale_y}});
    j["road"] = nlohmann::json::array();
    for (const Point2& p : s.road) j["road"].push_back({p.x, p.y});
    j["lane_offsets"] = s.lane_offsets;
    j["lane_jitter"] = s.lane_jitter;
    j["lane_wavelength"] = s.lane_wavelength;
    j["vehicles"] = {{"count", s.vehicle_count},   {"speed_min", s.speed_min},
                     {"speed_max", s.speed_max},   {"depart_every", s.depart_every},
                     {"length", s.vehicle_length}, {"width", s.vehicle_width},
                     {"models", s.vehicle_models}};
    j["visibility_skip_max"] = s.visibility_skip_max;
    j["stops"] = nlohmann::json::array();
    for (const StopSpec& st : s.stops)
        j["stops"].push_back({{"s", st.s}, {"duration", st.duration}, {"spread", st.spread}});
    j["noise"] = {{"sigma_box", s.noise.sigma_box},
                  {"miss_rate", s.noise.miss_rate},
                  {"fp_rate", s.noise.fp_rate},
                  {"sigma_emb", s.noise.sigma_emb},
                  {"meta_flip_rate", s.noise.meta_flip_rate}};
    return j;
}

// ---------------------------------------------------------------------------
// deterministic randomness, one stream per (seed, file role)
// ---------------------------------------------------------------------------

inline std::mt19937_64 stream_for(std::uint64_t seed, const std::string& role) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    for (char c : role) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001b3ULL;
    }
    return std::mt19937_64(h);
}

/// Latent plus componentwise Gaussian noise, before normalization. Exposed so
/// the noise process itself is checkable.
inline Vec add_gaussian_noise(const Vec& latent, double sigma, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, sigma);
    Vec v = latent;
    if (sigma > 0.0)
        for (double& x : v) x += gauss(rng);
    return v;
}

inline Vec random_unit_vector(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(dim);
    for (double& x : v) x = gauss(rng);
    return normalized(std::move(v));
}

// ---------------------------------------------------------------------------
// road geometry
// ---------------------------------------------------------------------------

namespace detail {

struct Polyline {
    std::vector<Point2> pts;
    std::vector<double> cum;  // cumulative arc length per vertex

    explicit Polyline(const std::vector<Point2>& points) : pts(points) {
        cum.resize(pts.size(), 0.0);
        for (std::size_t i = 1; i < pts.size(); ++i)
            cum[i] = cum[i - 1] + distance(pts[i - 1], pts[i]);
    }
    double length() const { return cum.back(); }

    void at(double s, Point2& pos, Point2& tangent) const {
        if (s <= 0.0) s = 0.0;
        if (s >= length()) s = length();
        std::size_t seg = 1;
        while (seg + 1 < pts.size() && cum[seg] < s) ++seg;
        const double seg_len = cum[seg] - cum[seg - 1];
        const double t = seg_len > 0.0 ? (s - cum[seg - 1]) / seg_len : 0.0;
        pos = {pts[seg - 1].x + t * (pts[seg].x - pts[seg - 1].x),
               pts[seg - 1].y + t * (pts[seg].y - pts[seg - 1].y)};
        const double dx = pts[seg].x - pts[seg - 1].x, dy = pts[seg].y - pts[seg - 1].y;
        const double n = std::hypot(dx, dy);
        tangent = n > 0.0 ? Point2{dx / n, dy / n} : Point2{1.0, 0.0};
    }
};

/// Axis-aligned bounding box of an oriented length x width rectangle.
inline Box oriented_vehicle_box(const Point2& center, const Point2& tangent, double length,
                                double width) {
    const double hx = (std::abs(tangent.x) * length + std::abs(tangent.y) * width) / 2.0;
    const double hy = (std::abs(tangent.y) * length + std::abs(tangent.x) * width) / 2.0;
    return {center.x - hx, center.y - hy, 2.0 * hx, 2.0 * hy};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// generation
// ---------------------------------------------------------------------------

struct Transition {
    int global_id = 0;
    int src_camera = 0;
    int dst_camera = 0;
    std::int64_t exit_frame = 0;
    std::int64_t entry_frame = 0;
};

struct SynthOutput {
    std::map<int, std::vector<Detection>> detections;
    std::map<int, EmbeddingTable> embeddings;
    std::map<int, std::vector<MetadataTable>> metadata;  // per camera: type, brand, color
    KeypointTable keypoints;
    GroundTruth gt;
    std::vector<Transition> transitions;
};

inline SynthOutput generate(const ScenarioSpec& spec) {
    spec.validate();
    SynthOutput out;
    const detail::Polyline road(spec.road);

    auto world_rng = stream_for(spec.seed, "world");
    const int n_models = spec.vehicle_models > 0 ? spec.vehicle_models : spec.vehicle_count;
    std::vector<Vec> prototypes;
    prototypes.reserve(n_models);
    for (int m = 0; m < n_models; ++m)
        prototypes.push_back(random_unit_vector(spec.embedding_dim, world_rng));
    std::uniform_real_distribution<double> speed_dist(spec.speed_min, spec.speed_max);
    std::vector<double> speeds(spec.vehicle_count);
    for (double& v : speeds) v = speed_dist(world_rng);
    std::uniform_real_distribution<double> amp_dist(0.0, spec.lane_jitter);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * 3.14159265358979323846);
    std::vector<double> drift_amp(spec.vehicle_count), drift_phase(spec.vehicle_count);
    for (int v = 0; v < spec.vehicle_count; ++v) {
        drift_amp[v] = spec.lane_jitter > 0.0 ? amp_dist(world_rng) : 0.0;
        drift_phase[v] = phase_dist(world_rng);
    }
    auto lateral_at = [&](int v, double s) {
        const double lane = spec.lane_offsets[v % spec.lane_offsets.size()];
        return lane + drift_amp[v] * std::sin(2.0 * 3.14159265358979323846 * s /
                                                  spec.lane_wavelength +
                                              drift_phase[v]);
    };

    const std::vector<std::string> attrs{"type", "brand", "color"};
    auto class_count = [&](const std::string& a) {
        auto it = spec.metadata_classes.find(a);
        return it == spec.metadata_classes.end() ? 1 : it->second;
    };
    auto model_of = [&](int vehicle) { return vehicle % n_models; };
    auto true_class = [&](int vehicle, std::size_t attr_idx) {
        return model_of(vehicle) % class_count(attrs[attr_idx]);
    };

    // per-vehicle motion trace: arc position and visibility per frame
    struct Sample {
        double s;
        bool visible;
    };
    std::vector<std::vector<Sample>> traces(spec.vehicle_count);  // indexed from depart frame
    std::vector<std::int64_t> departs(spec.vehicle_count);
    std::vector<std::vector<double>> stop_points(spec.vehicle_count);
    for (int v = 0; v < spec.vehicle_count; ++v) {
        departs[v] = static_cast<std::int64_t>(v) * spec.depart_every;
        for (const StopSpec& st : spec.stops) {
            const double gap = 1.2 * spec.vehicle_length;
            stop_points[v].push_back(st.s - (v % std::max(1, st.spread)) * gap);
        }
        double s = 0.0;
        std::size_t next_stop = 0;
        std::int64_t stopped = 0;
        while (s < road.length()) {
            if (stopped > 0) {
                traces[v].push_back({s, false});
                --stopped;
                continue;
            }
            traces[v].push_back({s, true});
            double ns = s + speeds[v];
            if (next_stop < stop_points[v].size() && s < stop_points[v][next_stop] &&
                ns >= stop_points[v][next_stop]) {
                ns = stop_points[v][next_stop];
                stopped = spec.stops[next_stop].duration;
                ++next_stop;
            }
            s = ns;
        }
    }
    std::int64_t max_frame = 0;
    for (int v = 0; v < spec.vehicle_count; ++v)
        max_frame = std::max(max_frame, departs[v] + static_cast<std::int64_t>(traces[v].size()));

    // lane-shifted world pose of vehicle v at arc position s
    auto world_pose = [&](int v, double s, Point2& pos, Point2& tangent) {
        road.at(s, pos, tangent);
        const double lat = lateral_at(v, s);
        pos.x += -tangent.y * lat;
        pos.y += tangent.x * lat;
    };

    // geometric in-FOV frame intervals, then per-(vehicle, camera) pickup and
    // dropout margins drawn from the world stream
    std::map<std::pair<int, int>, std::pair<std::int64_t, std::int64_t>> inside;
    for (const CameraSpec& cam : spec.cameras) {
        for (int v = 0; v < spec.vehicle_count; ++v) {
            for (std::int64_t rel = 0; rel < static_cast<std::int64_t>(traces[v].size()); ++rel) {
                Point2 pos, tangent;
                world_pose(v, traces[v][rel].s, pos, tangent);
                if (pos.x < cam.fov.x || pos.x > cam.fov.right() || pos.y < cam.fov.y ||
                    pos.y > cam.fov.bottom())
                    continue;
                const std::int64_t frame = departs[v] + rel;
                auto [it, inserted] =
                    inside.insert({{v, cam.camera_id}, {frame, frame}});
                if (!inserted) it->second.second = frame;
            }
        }
    }
    std::map<std::pair<int, int>, std::pair<int, int>> skips;
    {
        std::uniform_int_distribution<int> skip_dist(0, spec.visibility_skip_max);
        for (int v = 0; v < spec.vehicle_count; ++v)
            for (const CameraSpec& cam : spec.cameras) {
                const int a = skip_dist(world_rng);
                const int b = skip_dist(world_rng);
                skips[{v, cam.camera_id}] = {a, b};
            }
    }

    // camera-local visibility intervals (true motion, before detector noise)
    std::map<int, std::map<int, std::pair<std::int64_t, std::int64_t>>> visits;  // vehicle -> cam -> [first, last]

    struct EmittedDet {
        int vehicle;  // -1 for false positives
        Detection det;
    };
    std::map<int, std::vector<EmittedDet>> emitted;  // camera -> rows

    for (const CameraSpec& cam : spec.cameras) {
        auto det_rng = stream_for(spec.seed, "det/" + std::to_string(cam.camera_id));
        std::normal_distribution<double> jitter(0.0, spec.noise.sigma_box);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        for (std::int64_t frame = 0; frame < max_frame; ++frame) {
            int next_index = 0;
            for (int v = 0; v < spec.vehicle_count; ++v) {
                const std::int64_t rel = frame - departs[v];
                if (rel < 0 || rel >= static_cast<std::int64_t>(traces[v].size())) continue;
                const Sample& sample = traces[v][rel];
                if (!sample.visible) continue;
                Point2 pos, tangent;
                world_pose(v, sample.s, pos, tangent);
                if (pos.x < cam.fov.x || pos.x > cam.fov.right() || pos.y < cam.fov.y ||
                    pos.y > cam.fov.bottom())
                    continue;
                const auto window = inside.at({v, cam.camera_id});
                const auto skip = skips.at({v, cam.camera_id});
                if (frame < window.first + skip.first || frame > window.second - skip.second)
                    continue;

                auto& visit = visits[v];
                auto it = visit.find(cam.camera_id);
                if (it == visit.end())
                    visit[cam.camera_id] = {frame, frame};
                else
                    it->second.second = frame;

                const Box wbox = detail::oriented_vehicle_box(pos, tangent, spec.vehicle_length,
                                                              spec.vehicle_width);
                const Box ibox{(wbox.x - cam.fov.x) * cam.image_scale_x,
                               (wbox.y - cam.fov.y) * cam.image_scale_y,
                               wbox.w * cam.image_scale_x, wbox.h * cam.image_scale_y};

                // ground truth carries the clean box for every visible frame
                Detection gtd;
                gtd.camera_id = cam.camera_id;
                gtd.frame = frame;
                gtd.det_index = 0;
                gtd.box = ibox;
                out.gt.by_id[v + 1][cam.camera_id].push_back(gtd);

                const double jx = spec.noise.sigma_box > 0.0 ? jitter(det_rng) : 0.0;
                const double jy = spec.noise.sigma_box > 0.0 ? jitter(det_rng) : 0.0;
                const bool missed = unit(det_rng) < spec.noise.miss_rate;
                if (missed) continue;

                Detection d;
                d.camera_id = cam.camera_id;
                d.frame = frame;
                d.det_index = next_index++;
                d.box = {ibox.x + jx, ibox.y + jy, ibox.w, ibox.h};
                d.confidence = 1.0;
                emitted[cam.camera_id].push_back({v, d});

                // wheel keypoints from the clean pose
                const Point2 fa{pos.x + tangent.x * 0.3 * spec.vehicle_length,
                                pos.y + tangent.y * 0.3 * spec.vehicle_length};
                const Point2 ba{pos.x - tangent.x * 0.3 * spec.vehicle_length,
                                pos.y - tangent.y * 0.3 * spec.vehicle_length};
                const Point2 perp{-tangent.y, tangent.x};
                const double hw = 0.4 * spec.vehicle_width;
                auto project = [&](const Point2& p) {
                    return Point2{(p.x - cam.fov.x) * cam.image_scale_x,
                                  (p.y - cam.fov.y) * cam.image_scale_y};
                };
                WheelKeypoints wk;
                wk.front_left = project({fa.x + perp.x * hw, fa.y + perp.y * hw});
                wk.front_right = project({fa.x - perp.x * hw, fa.y - perp.y * hw});
                wk.back_left = project({ba.x + perp.x * hw, ba.y + perp.y * hw});
                wk.back_right = project({ba.x - perp.x * hw, ba.y - perp.y * hw});
                out.keypoints[key_of(d)] = wk;
            }
            if (unit(det_rng) < spec.noise.fp_rate) {
                const double iw = cam.fov.w * cam.image_scale_x;
                const double ih = cam.fov.h * cam.image_scale_y;
                Detection d;
                d.camera_id = cam.camera_id;
                d.frame = frame;
                d.det_index = next_index++;
                const double bw = spec.vehicle_length * cam.image_scale_x * (0.8 + 0.4 * unit(det_rng));
                const double bh = spec.vehicle_width * cam.image_scale_y * (0.8 + 0.4 * unit(det_rng));
                d.box = {unit(det_rng) * std::max(1.0, iw - bw),
                         unit(det_rng) * std::max(1.0, ih - bh), bw, bh};
                d.confidence = 1.0;
                emitted[cam.camera_id].push_back({-1, d});
            }
        }
    }

    // embeddings and metadata, one stream per output file
    for (const CameraSpec& cam : spec.cameras) {
        auto emb_rng = stream_for(spec.seed, "emb/" + std::to_string(cam.camera_id));
        EmbeddingTable table;
        table.dim = spec.embedding_dim;
        for (const EmittedDet& e : emitted[cam.camera_id]) {
            Vec emb = e.vehicle >= 0
                          ? normalized(add_gaussian_noise(prototypes[model_of(e.vehicle)],
                                                          spec.noise.sigma_emb, emb_rng))
                          : random_unit_vector(spec.embedding_dim, emb_rng);
            table.rows[key_of(e.det)] = std::move(emb);
        }
        out.embeddings[cam.camera_id] = std::move(table);

        for (std::size_t a = 0; a < attrs.size(); ++a) {
            auto meta_rng =
                stream_for(spec.seed, "meta_" + attrs[a] + "/" + std::to_string(cam.camera_id));
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            MetadataTable table_a;
            table_a.attribute = attrs[a];
            table_a.class_count = class_count(attrs[a]);
            for (const EmittedDet& e : emitted[cam.camera_id]) {
                int cls;
                if (e.vehicle < 0) {
                    cls = static_cast<int>(unit(meta_rng) * table_a.class_count) %
                          table_a.class_count;
                } else {
                    cls = true_class(e.vehicle, a);
                    if (spec.noise.meta_flip_rate > 0.0 && unit(meta_rng) < spec.noise.meta_flip_rate) {
                        const int shift = 1 + static_cast<int>(unit(meta_rng) *
                                                               (table_a.class_count - 1)) %
                                                  std::max(1, table_a.class_count - 1);
                        cls = (cls + shift) % table_a.class_count;
                    }
                }
                Vec p(table_a.class_count, 0.0);
                p[cls] = 1.0;
                table_a.rows[key_of(e.det)] = std::move(p);
            }
            out.metadata[cam.camera_id].push_back(std::move(table_a));
        }

        std::vector<Detection> dets;
        dets.reserve(emitted[cam.camera_id].size());
        for (const EmittedDet& e : emitted[cam.camera_id]) dets.push_back(e.det);
        out.detections[cam.camera_id] = std::move(dets);
    }

    for (const auto& [vehicle, cams] : visits) {
        std::vector<std::pair<std::int64_t, int>> order;
        for (const auto& [cam, span] : cams) order.push_back({span.first, cam});
        std::sort(order.begin(), order.end());
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            const int src = order[i].second, dst = order[i + 1].second;
            out.transitions.push_back({vehicle + 1, src, dst, cams.at(src).second,
                                       cams.at(dst).first});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// file emission (exactly the ingest formats)
// ---------------------------------------------------------------------------

inline std::string transitions_csv(const std::vector<Transition>& ts) {
    std::string out;
    for (const Transition& t : ts)
        out += std::to_string(t.global_id) + "," + std::to_string(t.src_camera) + "," +
               std::to_string(t.dst_camera) + "," + std::to_string(t.exit_frame) + "," +
               std::to_string(t.entry_frame) + "," +
               std::to_string(t.entry_frame - t.exit_frame) + "\n";
    return out;
}

inline void write_scenario(const ScenarioSpec& spec, const SynthOutput& out,
                           const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto path = [&](const std::string& name) { return (fs::path(dir) / name).string(); };

    for (const auto& [cam, dets] : out.detections) {
        const std::string c = std::to_string(cam);
        write_text_file(path("cam" + c + "_det.csv"), serialize_detections(dets));
        write_text_file(path("cam" + c + "_emb.csv"),
                        serialize_embeddings(out.embeddings.at(cam)));
        for (const MetadataTable& t : out.metadata.at(cam))
            write_text_file(path("cam" + c + "_meta_" + t.attribute + ".csv"),
                            serialize_metadata(t));
    }
    write_text_file(path("keypoints.csv"), serialize_keypoints(out.keypoints));
    write_text_file(path("gt.csv"), serialize_ground_truth(out.gt));
    write_text_file(path("links_true.csv"), transitions_csv(out.transitions));
    write_text_file(path("scenario.json"), scenario_to_json(spec).dump(2) + "\n");
}

}  // namespace mtmc::synth
