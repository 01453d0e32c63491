#pragma once

#include <filesystem>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtmc/clm.hpp"
#include "mtmc/config.hpp"
#include "mtmc/features.hpp"
#include "mtmc/io.hpp"
#include "mtmc/metrics.hpp"
#include "mtmc/mtmct.hpp"
#include "mtmc/sct.hpp"
#include "mtmc/synth.hpp"
#include "mtmc/zones.hpp"

namespace mtmc {

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// input discovery: cam<ID>_det.csv [+ cam<ID>_emb.csv, cam<ID>_meta_*.csv]
// ---------------------------------------------------------------------------

struct CameraInputs {
    int camera_id = 0;
    std::vector<Detection> detections;
    EmbeddingTable embeddings;
    std::vector<MetadataTable> metadata;  // present attributes only
};

inline std::vector<int> discover_cameras(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<int> cams;
    if (!fs::is_directory(dir)) throw ParseError("input directory not found: " + dir);
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("cam", 0) != 0) continue;
        const auto pos = name.find("_det.csv");
        if (pos == std::string::npos || pos + 8 != name.size()) continue;
        try {
            cams.push_back(std::stoi(name.substr(3, pos - 3)));
        } catch (const std::exception&) {
            continue;
        }
    }
    std::sort(cams.begin(), cams.end());
    if (cams.empty()) throw ParseError("no cam<ID>_det.csv files in " + dir);
    return cams;
}

/// Load one camera's detection file plus sidecars, already shifted onto the
/// global clock via the configured frame offset.
inline CameraInputs load_camera_inputs(const std::string& dir, int camera_id,
                                       const PipelineConfig& config) {
    namespace fs = std::filesystem;
    const std::string base = (fs::path(dir) / ("cam" + std::to_string(camera_id))).string();
    CameraInputs in;
    in.camera_id = camera_id;
    in.detections = parse_detections(base + "_det.csv", camera_id);
    in.embeddings = parse_embeddings(base + "_emb.csv", camera_id, in.detections);
    for (const std::string attr : {"type", "brand", "color"}) {
        const std::string p = base + "_meta_" + attr + ".csv";
        if (fs::exists(p)) in.metadata.push_back(parse_metadata(p, camera_id, in.detections));
    }

    const std::int64_t off = config.frame_offset(camera_id);
    if (off != 0) {
        apply_frame_offset(in.detections, off);
        auto shift = [&](auto& rows) {
            std::remove_reference_t<decltype(rows)> shifted;
            for (auto& [k, v] : rows) shifted[{k.camera_id, k.frame + off, k.det_index}] = std::move(v);
            rows = std::move(shifted);
        };
        shift(in.embeddings.rows);
        for (MetadataTable& t : in.metadata) shift(t.rows);
    }
    return in;
}

inline std::vector<CameraInputs> load_input_dir(const std::string& dir,
                                                const PipelineConfig& config) {
    std::vector<CameraInputs> inputs;
    for (int cam : discover_cameras(dir)) inputs.push_back(load_camera_inputs(dir, cam, config));
    // fused feature dimensions must agree across cameras
    for (std::size_t i = 1; i < inputs.size(); ++i) {
        if (inputs[i].embeddings.dim != inputs[0].embeddings.dim)
            throw ValidationError("camera " + std::to_string(inputs[i].camera_id) +
                                  " embedding dim differs from camera " +
                                  std::to_string(inputs[0].camera_id));
        auto attrs = [](const CameraInputs& in) {
            std::string s;
            for (const MetadataTable& t : in.metadata) s += t.attribute + ",";
            return s;
        };
        if (attrs(inputs[i]) != attrs(inputs[0]))
            throw ValidationError("camera " + std::to_string(inputs[i].camera_id) +
                                  " metadata attributes differ from camera " +
                                  std::to_string(inputs[0].camera_id));
    }
    return inputs;
}

// ---------------------------------------------------------------------------
// per-camera stages
// ---------------------------------------------------------------------------

inline std::vector<Trajectory> run_sct_camera(const CameraInputs& in,
                                              const PipelineConfig& config) {
    const auto tracklets = associate_detections(in.detections, in.embeddings, config);
    return cluster_tracklets(tracklets, config);
}

/// Raw per-camera tracking for every camera; `jobs` > 1 runs cameras
/// concurrently. Output order is by camera id either way.
inline std::map<int, std::vector<Trajectory>> run_sct(const std::vector<CameraInputs>& inputs,
                                                      const PipelineConfig& config, int jobs = 1) {
    std::map<int, std::vector<Trajectory>> result;
    if (jobs <= 1 || inputs.size() <= 1) {
        for (const CameraInputs& in : inputs) result[in.camera_id] = run_sct_camera(in, config);
        return result;
    }
    std::vector<std::future<std::vector<Trajectory>>> futures;
    futures.reserve(inputs.size());
    for (const CameraInputs& in : inputs)
        futures.push_back(std::async(std::launch::async,
                                     [&in, &config] { return run_sct_camera(in, config); }));
    for (std::size_t i = 0; i < inputs.size(); ++i)
        result[inputs[i].camera_id] = futures[i].get();
    return result;
}

/// Rebuild trajectories from an SCT CSV against the ingested detections.
/// Rows are matched on (camera, frame) and near-equal box coordinates so the
/// detection indices (and with them the sidecar features) are recovered.
inline std::map<int, std::vector<Trajectory>> trajectories_from_sct_rows(
    const std::vector<TrackRow>& rows, const std::vector<CameraInputs>& inputs) {
    std::map<std::pair<int, std::int64_t>, std::vector<const Detection*>> by_frame;
    for (const CameraInputs& in : inputs)
        for (const Detection& d : in.detections) by_frame[{d.camera_id, d.frame}].push_back(&d);

    auto near = [](double a, double b) {
        return std::abs(a - b) <= 1e-3 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    std::map<std::pair<int, int>, std::vector<Detection>> grouped;  // (camera, local_id)
    std::set<const Detection*> claimed;
    for (const TrackRow& r : rows) {
        auto it = by_frame.find({r.camera_id, r.frame});
        const Detection* found = nullptr;
        if (it != by_frame.end()) {
            for (const Detection* d : it->second) {
                if (claimed.count(d)) continue;
                if (near(d->box.x, r.box.x) && near(d->box.y, r.box.y) &&
                    near(d->box.w, r.box.w) && near(d->box.h, r.box.h)) {
                    found = d;
                    break;
                }
            }
        }
        if (!found)
            throw ValidationError("SCT row (camera " + std::to_string(r.camera_id) + ", frame " +
                                  std::to_string(r.frame) +
                                  ") matches no ingested detection");
        claimed.insert(found);
        grouped[{r.camera_id, r.id}].push_back(*found);
    }
    std::map<int, std::vector<Trajectory>> result;
    for (auto& [key, dets] : grouped) {
        Trajectory t;
        t.camera_id = key.first;
        t.local_id = key.second;
        std::sort(dets.begin(), dets.end(),
                  [](const Detection& a, const Detection& b) { return a.frame < b.frame; });
        t.detections = std::move(dets);
        result[key.first].push_back(std::move(t));
    }
    return result;
}

// ---------------------------------------------------------------------------
// camera link model training (from ground truth)
// ---------------------------------------------------------------------------

/// Ground-truth boxes of one vehicle in one camera, viewed as a trajectory.
inline std::map<int, std::vector<Trajectory>> gt_trajectories(const GroundTruth& gt) {
    std::map<int, std::vector<Trajectory>> per_camera;
    for (const auto& [gid, cams] : gt.by_id) {
        for (const auto& [cam, dets] : cams) {
            Trajectory t;
            t.camera_id = cam;
            t.local_id = gid;
            t.detections = dets;
            per_camera[cam].push_back(std::move(t));
        }
    }
    return per_camera;
}

/// Learn zones, zone pairs and camera links from a ground-truth file. Zone
/// geometry comes from the ground-truth trajectory endpoints so the model is
/// anchored to the scene rather than to one tracker run.
inline CameraLinkModel train_clm(const GroundTruth& gt, const PipelineConfig& config) {
    const auto per_camera = gt_trajectories(gt);
    std::map<int, std::vector<Zone>> zones;
    std::map<int, std::vector<ZonePair>> pairs;
    for (const auto& [cam, trajs] : per_camera) {
        zones[cam] = build_zones(trajs, config);
        pairs[cam] = build_zone_pairs(zones[cam]);
    }
    std::vector<TrainingTrack> tracks;
    for (const auto& [cam, trajs] : per_camera) {
        for (const Trajectory& t : trajs) {
            TrainingTrack tt;
            tt.global_id = t.local_id;
            tt.profile = compute_zone_profile(t, zones[cam]);
            tt.profile.pair_id = assign_zone_pair(tt.profile, pairs[cam], config.max_pair_distance);
            tracks.push_back(std::move(tt));
        }
    }
    return learn_links(tracks, zones, pairs, config);
}

// ---------------------------------------------------------------------------
// full tracking pipeline
// ---------------------------------------------------------------------------

struct TrackResult {
    std::vector<TrackRow> rows;                      // global-ID output
    std::map<int, std::vector<Trajectory>> sct;      // raw per-camera tracking
    std::map<int, std::vector<Trajectory>> refined;  // after reconnection
    std::map<int, std::vector<Zone>> zones;          // inferred per camera
    std::vector<MergeEvent> merges;
    GlobalAssignment assignment;
    MatrixStats stats;
    nlohmann::json report;
};

/// ingest -> sct -> zones -> reconnect -> fusion -> constrained clustering.
/// `sct_override` (from a prior `sct` run) replaces the internal tracker;
/// `zones_override` pins previously exported zones instead of re-inferring.
inline TrackResult run_track(const std::vector<CameraInputs>& inputs,
                             const PipelineConfig& config, const CameraLinkModel* model,
                             int jobs = 1,
                             const std::map<int, std::vector<Trajectory>>* sct_override = nullptr,
                             const std::map<int, std::vector<Zone>>* zones_override = nullptr) {
    TrackResult result;
    result.sct = sct_override ? *sct_override : run_sct(inputs, config, jobs);

    std::map<int, const CameraInputs*> input_of;
    for (const CameraInputs& in : inputs) input_of[in.camera_id] = &in;

    std::vector<Trajectory> all;
    std::vector<TrajZoneProfile> profiles;
    for (auto& [cam, trajs] : result.sct) {
        const CameraInputs& in = *input_of.at(cam);
        if (zones_override && zones_override->count(cam))
            result.zones[cam] = zones_override->at(cam);
        else
            result.zones[cam] = build_zones(trajs, config);
        ReconnectResult rec = reconnect_isolated(trajs, result.zones[cam], in.embeddings, config);
        result.merges.insert(result.merges.end(), rec.merges.begin(), rec.merges.end());

        std::vector<const MetadataTable*> meta;
        for (const MetadataTable& t : in.metadata) meta.push_back(&t);
        fuse_trajectories(rec.trajectories, in.embeddings, meta, config);

        for (Trajectory& t : rec.trajectories) {
            if (model) {
                auto zit = model->zones.find(cam);
                auto pit = model->zone_pairs.find(cam);
                TrajZoneProfile profile =
                    compute_zone_profile(t, zit != model->zones.end() ? zit->second
                                                                      : std::vector<Zone>{});
                profile.pair_id =
                    pit != model->zone_pairs.end()
                        ? assign_zone_pair(profile, pit->second, config.max_pair_distance)
                        : -1;
                t.zone_pair_id = profile.pair_id;
                profiles.push_back(std::move(profile));
            } else {
                profiles.push_back({{t.camera_id, t.local_id}, -1, {}, t.first_frame(),
                                    t.last_frame()});
            }
            all.push_back(t);
        }
        result.refined[cam] = std::move(rec.trajectories);
    }

    BuiltMatrix built = build_distance_matrix(all, profiles, model);
    result.stats = built.stats;
    result.assignment =
        hierarchical_cluster(built.matrix, config.cluster_delta, config.cluster_iterations,
                             built.order);

    for (const Trajectory& t : all) {
        const int gid = result.assignment.global_ids.at({t.camera_id, t.local_id});
        for (const Detection& d : t.detections) result.rows.push_back({t.camera_id, d.frame, gid, d.box});
    }
    std::sort(result.rows.begin(), result.rows.end(), [](const TrackRow& a, const TrackRow& b) {
        return std::tuple(a.camera_id, a.frame, a.id) < std::tuple(b.camera_id, b.frame, b.id);
    });

    // run report: how hard the constraints pruned and what was matched
    nlohmann::json links = nlohmann::json::array();
    for (const auto& [link_idx, matches] : result.assignment.link_matches)
        links.push_back({{"link_index", link_idx}, {"matches", matches.size()}});
    std::size_t n_traj = all.size();
    std::set<int> gids;
    for (const auto& [k, g] : result.assignment.global_ids) gids.insert(g);
    result.report = {
        {"tool_version", kToolVersion},
        {"cameras", result.sct.size()},
        {"trajectories", n_traj},
        {"global_ids", gids.size()},
        {"reconnect_merges", result.merges.size()},
        {"cross_camera_pairs", result.stats.cross_camera_pairs},
        {"valid_pairs", result.stats.valid_pairs},
        {"pruned_pairs", result.stats.cross_camera_pairs - result.stats.valid_pairs},
        {"clm_constrained", model != nullptr},
        {"link_matches", links},
    };
    return result;
}

// ---------------------------------------------------------------------------
// run manifest
// ---------------------------------------------------------------------------

struct RunManifest {
    std::string subcommand;
    std::map<std::string, std::string> inputs;
    std::string config_path;
    std::string output_dir;
    std::vector<std::string> stages;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const {
        return {{"tool_version", kToolVersion}, {"subcommand", subcommand},
                {"inputs", inputs},             {"config_path", config_path},
                {"output_dir", output_dir},     {"stages", stages},
                {"seed", seed}};
    }
};

}  // namespace mtmc
