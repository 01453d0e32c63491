#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "mtmc/errors.hpp"

namespace mtmc {

/// Tuning knobs for the whole pipeline. Defaults follow the reference
/// deployment: MeanShift bandwidth 250 px, zone densities at 0.8, a 64-frame
/// tracklet window and a low reconnection IOU.
struct PipelineConfig {
    // zone inference
    double bandwidth = 250.0;
    double rho_entry = 0.8;
    double rho_exit = 0.8;
    double rho_traffic = 0.8;
    int min_zone_points = 5;
    double traffic_zone_area_factor = 1.5;  // zone area vs mean vehicle box area

    // frame-to-frame association
    double iou_assoc_threshold = 0.1;
    int assoc_gap_frames = 2;  // unmatched frames tolerated before a tracklet closes

    // tracklet graph
    int tracklet_gap_max = 64;  // frames skipped between tracklets before "incompatible"
    double edge_weight_appearance = 0.5;
    double edge_weight_time = 0.25;
    double edge_weight_motion = 0.25;
    double tracklet_merge_threshold = 0.3;

    // isolated-trajectory reconnection
    double iou_reconnect_threshold = 0.05;
    double appearance_reconnect_threshold = 0.4;
    std::int64_t reconnect_ttl_frames = 1800;
    int reconnect_min_track_frames = 2;  // shorter tracks never join zone queues

    // cross-camera clustering
    double cluster_delta = 0.6;
    int cluster_iterations = 2;

    // camera link model
    double window_percentile_low = 0.0;
    double window_percentile_high = 100.0;
    double window_padding_frames = 10.0;
    int min_link_samples = 3;
    double max_pair_distance = 1.5;

    // feature fusion
    double metadata_weight = 1.0;
    int clip_size = 4;

    // evaluation
    double eval_iou_threshold = 0.5;

    // geometry conventions
    bool y_axis_points_up = true;

    // local-to-global clock mapping; absent camera means offset 0
    std::map<int, std::int64_t> frame_offsets;

    std::int64_t frame_offset(int camera_id) const {
        auto it = frame_offsets.find(camera_id);
        return it == frame_offsets.end() ? 0 : it->second;
    }

    void validate() const {
        auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (bandwidth <= 0.0) throw ValidationError("config: bandwidth must be > 0");
        if (!in01(rho_entry) || !in01(rho_exit) || !in01(rho_traffic))
            throw ValidationError("config: zone density thresholds must be in [0,1]");
        if (min_zone_points < 1) throw ValidationError("config: min_zone_points must be >= 1");
        if (!in01(iou_assoc_threshold)) throw ValidationError("config: iou_assoc_threshold must be in [0,1]");
        if (!in01(iou_reconnect_threshold)) throw ValidationError("config: iou_reconnect_threshold must be in [0,1]");
        if (appearance_reconnect_threshold < -1.0 || appearance_reconnect_threshold > 1.0)
            throw ValidationError("config: appearance_reconnect_threshold must be in [-1,1]");
        if (assoc_gap_frames < 0) throw ValidationError("config: assoc_gap_frames must be >= 0");
        if (reconnect_min_track_frames < 1)
            throw ValidationError("config: reconnect_min_track_frames must be >= 1");
        if (tracklet_gap_max < 1) throw ValidationError("config: tracklet_gap_max must be >= 1");
        if (cluster_delta <= 0.0) throw ValidationError("config: cluster_delta must be > 0");
        if (cluster_iterations < 1) throw ValidationError("config: cluster_iterations must be >= 1");
        if (window_percentile_low < 0.0 || window_percentile_high > 100.0 ||
            window_percentile_low > window_percentile_high)
            throw ValidationError("config: window percentiles must satisfy 0 <= low <= high <= 100");
        if (window_padding_frames < 0.0) throw ValidationError("config: window_padding_frames must be >= 0");
        if (min_link_samples < 1) throw ValidationError("config: min_link_samples must be >= 1");
        if (metadata_weight < 0.0) throw ValidationError("config: metadata_weight must be >= 0");
        if (clip_size < 1) throw ValidationError("config: clip_size must be >= 1");
        if (eval_iou_threshold <= 0.0 || eval_iou_threshold >= 1.0)
            throw ValidationError("config: eval_iou_threshold must be in (0,1)");
        if (traffic_zone_area_factor < 0.0)
            throw ValidationError("config: traffic_zone_area_factor must be >= 0");
    }
};

inline PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const nlohmann::json& v = it.value();
        if (k == "bandwidth") c.bandwidth = v.get<double>();
        else if (k == "rho_entry") c.rho_entry = v.get<double>();
        else if (k == "rho_exit") c.rho_exit = v.get<double>();
        else if (k == "rho_traffic") c.rho_traffic = v.get<double>();
        else if (k == "min_zone_points") c.min_zone_points = v.get<int>();
        else if (k == "traffic_zone_area_factor") c.traffic_zone_area_factor = v.get<double>();
        else if (k == "iou_assoc_threshold") c.iou_assoc_threshold = v.get<double>();
        else if (k == "assoc_gap_frames") c.assoc_gap_frames = v.get<int>();
        else if (k == "tracklet_gap_max") c.tracklet_gap_max = v.get<int>();
        else if (k == "edge_weight_appearance") c.edge_weight_appearance = v.get<double>();
        else if (k == "edge_weight_time") c.edge_weight_time = v.get<double>();
        else if (k == "edge_weight_motion") c.edge_weight_motion = v.get<double>();
        else if (k == "tracklet_merge_threshold") c.tracklet_merge_threshold = v.get<double>();
        else if (k == "iou_reconnect_threshold") c.iou_reconnect_threshold = v.get<double>();
        else if (k == "appearance_reconnect_threshold") c.appearance_reconnect_threshold = v.get<double>();
        else if (k == "reconnect_ttl_frames") c.reconnect_ttl_frames = v.get<std::int64_t>();
        else if (k == "reconnect_min_track_frames") c.reconnect_min_track_frames = v.get<int>();
        else if (k == "cluster_delta") c.cluster_delta = v.get<double>();
        else if (k == "cluster_iterations") c.cluster_iterations = v.get<int>();
        else if (k == "window_percentile_low") c.window_percentile_low = v.get<double>();
        else if (k == "window_percentile_high") c.window_percentile_high = v.get<double>();
        else if (k == "window_padding_frames") c.window_padding_frames = v.get<double>();
        else if (k == "min_link_samples") c.min_link_samples = v.get<int>();
        else if (k == "max_pair_distance") c.max_pair_distance = v.get<double>();
        else if (k == "metadata_weight") c.metadata_weight = v.get<double>();
        else if (k == "clip_size") c.clip_size = v.get<int>();
        else if (k == "eval_iou_threshold") c.eval_iou_threshold = v.get<double>();
        else if (k == "y_axis_points_up") c.y_axis_points_up = v.get<bool>();
        else if (k == "frame_offsets") {
            for (auto oit = v.begin(); oit != v.end(); ++oit)
                c.frame_offsets[std::stoi(oit.key())] = oit.value().get<std::int64_t>();
        } else {
            throw ValidationError("config: unknown key '" + k + "'");
        }
    }
    c.validate();
    return c;
}

inline nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json j{
        {"bandwidth", c.bandwidth},
        {"rho_entry", c.rho_entry},
        {"rho_exit", c.rho_exit},
        {"rho_traffic", c.rho_traffic},
        {"min_zone_points", c.min_zone_points},
        {"traffic_zone_area_factor", c.traffic_zone_area_factor},
        {"iou_assoc_threshold", c.iou_assoc_threshold},
        {"assoc_gap_frames", c.assoc_gap_frames},
        {"tracklet_gap_max", c.tracklet_gap_max},
        {"edge_weight_appearance", c.edge_weight_appearance},
        {"edge_weight_time", c.edge_weight_time},
        {"edge_weight_motion", c.edge_weight_motion},
        {"tracklet_merge_threshold", c.tracklet_merge_threshold},
        {"iou_reconnect_threshold", c.iou_reconnect_threshold},
        {"appearance_reconnect_threshold", c.appearance_reconnect_threshold},
        {"reconnect_ttl_frames", c.reconnect_ttl_frames},
        {"reconnect_min_track_frames", c.reconnect_min_track_frames},
        {"cluster_delta", c.cluster_delta},
        {"cluster_iterations", c.cluster_iterations},
        {"window_percentile_low", c.window_percentile_low},
        {"window_percentile_high", c.window_percentile_high},
        {"window_padding_frames", c.window_padding_frames},
        {"min_link_samples", c.min_link_samples},
        {"max_pair_distance", c.max_pair_distance},
        {"metadata_weight", c.metadata_weight},
        {"clip_size", c.clip_size},
        {"eval_iou_threshold", c.eval_iou_threshold},
        {"y_axis_points_up", c.y_axis_points_up},
    };
    nlohmann::json offs = nlohmann::json::object();
    for (const auto& [cam, off] : c.frame_offsets) offs[std::to_string(cam)] = off;
    j["frame_offsets"] = offs;
    return j;
}

}  // namespace mtmc
