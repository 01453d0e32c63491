// Command-line front end for the multi-camera vehicle tracking pipeline.
//
// Subcommands: synth, sct, zones, clm-train, track, eval. Data goes to files
// or stdout; warnings and progress go to stderr. Exit codes: 0 success,
// 1 IO/validation failure, 2 usage error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mtmc/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

mtmc::PipelineConfig load_config_opt(const std::string& path) {
    if (path.empty()) return mtmc::PipelineConfig{};
    return mtmc::load_config(path);
}

void write_manifest(const mtmc::RunManifest& manifest) {
    fs::create_directories(manifest.output_dir);
    mtmc::write_text_file((fs::path(manifest.output_dir) / "manifest.json").string(),
                          manifest.to_json().dump(2) + "\n");
}

int run_synth(const std::string& spec_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override) {
    json j = json::parse(mtmc::read_text_file(spec_path));
    mtmc::synth::ScenarioSpec spec = mtmc::synth::scenario_from_json(j);
    if (seed_override) spec.seed = *seed_override;
    const mtmc::synth::SynthOutput out = mtmc::synth::generate(spec);
    mtmc::synth::write_scenario(spec, out, out_dir);
    mtmc::RunManifest manifest;
    manifest.subcommand = "synth";
    manifest.inputs["spec"] = spec_path;
    manifest.output_dir = out_dir;
    manifest.stages = {"synth"};
    manifest.seed = spec.seed;
    write_manifest(manifest);
    std::cerr << "synth: " << out.detections.size() << " cameras, "
              << out.gt.by_id.size() << " vehicles -> " << out_dir << "\n";
    return 0;
}

int run_sct_cmd(const std::string& in_dir, const std::string& config_path,
                const std::string& out_path, int jobs) {
    const auto config = load_config_opt(config_path);
    const auto inputs = mtmc::load_input_dir(in_dir, config);
    const auto sct = mtmc::run_sct(inputs, config, jobs);
    std::vector<mtmc::TrackRow> rows;
    for (const auto& [cam, trajs] : sct) {
        auto r = mtmc::trajectories_to_rows(trajs);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    mtmc::write_text_file(out_path, mtmc::serialize_tracks(std::move(rows)));
    std::cerr << "sct: wrote " << out_path << "\n";
    return 0;
}

int run_zones_cmd(const std::string& in_dir, const std::string& config_path,
                  const std::string& from_sct, const std::string& out_path, int jobs) {
    const auto config = load_config_opt(config_path);
    const auto inputs = mtmc::load_input_dir(in_dir, config);
    std::map<int, std::vector<mtmc::Trajectory>> sct;
    if (!from_sct.empty())
        sct = mtmc::trajectories_from_sct_rows(mtmc::parse_tracks(from_sct), inputs);
    else
        sct = mtmc::run_sct(inputs, config, jobs);
    std::vector<mtmc::Zone> zones;
    for (const auto& [cam, trajs] : sct) {
        const auto z = mtmc::build_zones(trajs, config);
        zones.insert(zones.end(), z.begin(), z.end());
    }
    mtmc::write_text_file(out_path, mtmc::serialize_zones(std::move(zones)));
    std::cerr << "zones: wrote " << out_path << "\n";
    return 0;
}

int run_clm_train(const std::string& gt_path, const std::string& config_path,
                  const std::string& out_path) {
    const auto config = load_config_opt(config_path);
    const auto gt = mtmc::parse_ground_truth(gt_path);
    const mtmc::CameraLinkModel model = mtmc::train_clm(gt, config);
    if (model.training_tracks_skipped > 0)
        std::cerr << "warning: " << model.training_tracks_skipped
                  << " training tracks had no zone-pair assignment and were skipped\n";
    mtmc::write_text_file(out_path, mtmc::clm_to_json(model).dump(2) + "\n");
    std::cerr << "clm-train: " << model.links.size() << " links -> " << out_path << "\n";
    return 0;
}

int run_track_cmd(const std::string& in_dir, const std::string& config_path,
                  const std::string& clm_path, const std::string& from_sct,
                  const std::string& zones_path, const std::string& out_dir, int jobs) {
    const auto config = load_config_opt(config_path);
    const auto inputs = mtmc::load_input_dir(in_dir, config);

    std::optional<mtmc::CameraLinkModel> model;
    if (!clm_path.empty())
        model = mtmc::clm_from_json(json::parse(mtmc::read_text_file(clm_path)));
    else
        std::cerr << "warning: no --clm given; all cross-camera pairs are considered valid\n";

    std::map<int, std::vector<mtmc::Trajectory>> sct_override;
    if (!from_sct.empty())
        sct_override = mtmc::trajectories_from_sct_rows(mtmc::parse_tracks(from_sct), inputs);

    std::map<int, std::vector<mtmc::Zone>> pinned_zones;
    if (!zones_path.empty())
        for (const mtmc::Zone& z : mtmc::parse_zones(zones_path))
            pinned_zones[z.camera_id].push_back(z);

    const mtmc::TrackResult result =
        mtmc::run_track(inputs, config, model ? &*model : nullptr, jobs,
                        from_sct.empty() ? nullptr : &sct_override,
                        zones_path.empty() ? nullptr : &pinned_zones);

    fs::create_directories(out_dir);
    mtmc::write_text_file((fs::path(out_dir) / "tracks.csv").string(),
                          mtmc::serialize_tracks(result.rows));
    mtmc::write_text_file((fs::path(out_dir) / "report.json").string(),
                          result.report.dump(2) + "\n");
    std::vector<mtmc::Trajectory> fused;
    std::vector<mtmc::Zone> zones;
    for (const auto& [cam, trajs] : result.refined)
        fused.insert(fused.end(), trajs.begin(), trajs.end());
    for (const auto& [cam, z] : result.zones) zones.insert(zones.end(), z.begin(), z.end());
    mtmc::write_text_file((fs::path(out_dir) / "features.csv").string(),
                          mtmc::serialize_fused_features(fused));
    mtmc::write_text_file((fs::path(out_dir) / "zones.csv").string(),
                          mtmc::serialize_zones(std::move(zones)));
    mtmc::RunManifest manifest;
    manifest.subcommand = "track";
    manifest.inputs["in"] = in_dir;
    if (!clm_path.empty()) manifest.inputs["clm"] = clm_path;
    if (!from_sct.empty()) manifest.inputs["from_sct"] = from_sct;
    if (!zones_path.empty()) manifest.inputs["zones"] = zones_path;
    manifest.config_path = config_path;
    manifest.output_dir = out_dir;
    manifest.stages = from_sct.empty()
                          ? std::vector<std::string>{"ingest", "sct", "zones", "reconnect",
                                                     "fusion", "mtmct"}
                          : std::vector<std::string>{"ingest", "load-sct", "zones", "reconnect",
                                                     "fusion", "mtmct"};
    write_manifest(manifest);
    std::cerr << "track: " << result.report["global_ids"] << " global ids -> " << out_dir
              << "\n";
    return 0;
}

int run_eval_cmd(const std::string& pred_path, const std::string& gt_path, double delta,
                 const std::string& out_path, const std::string& per_camera_path) {
    const auto pred = mtmc::parse_tracks(pred_path);
    const auto gt = mtmc::parse_tracks(gt_path);
    mtmc::check_camera_sets(pred, gt);
    const mtmc::EvalReport rep = mtmc::evaluate(pred, gt, delta);
    const std::string text = mtmc::report_to_json(rep).dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) mtmc::write_text_file(out_path, text);

    if (!per_camera_path.empty()) {
        std::set<int> cams;
        for (const auto& r : gt) cams.insert(r.camera_id);
        std::string csv = "camera_id,IDF1,IDP,IDR,MOTA,MOTP,Recall,MT\n";
        for (int cam : cams) {
            auto filter = [cam](const std::vector<mtmc::TrackRow>& rows) {
                std::vector<mtmc::TrackRow> out;
                for (const auto& r : rows)
                    if (r.camera_id == cam) out.push_back(r);
                return out;
            };
            const mtmc::EvalReport cr = mtmc::evaluate(filter(pred), filter(gt), delta);
            csv += std::to_string(cam) + "," + mtmc::format_num(cr.idf1) + "," +
                   mtmc::format_num(cr.idp) + "," + mtmc::format_num(cr.idr) + "," +
                   mtmc::format_num(cr.mota) + "," + mtmc::format_num(cr.motp) + "," +
                   mtmc::format_num(cr.recall) + "," + std::to_string(cr.mostly_tracked) + "\n";
        }
        mtmc::write_text_file(per_camera_path, csv);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-target multi-camera vehicle tracking"};
    app.set_version_flag("--version", std::string(mtmc::kToolVersion));
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic scenario");
    std::string synth_spec, synth_out;
    std::optional<std::uint64_t> synth_seed;
    synth->add_option("--spec", synth_spec, "scenario JSON")->required();
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--seed", synth_seed, "override the scenario seed");

    // sct
    auto* sct = app.add_subcommand("sct", "per-camera tracking");
    std::string sct_in, sct_config, sct_out;
    int sct_jobs = 1;
    sct->add_option("--in", sct_in, "input directory")->required();
    sct->add_option("--config", sct_config, "pipeline config JSON");
    sct->add_option("--out", sct_out, "output CSV")->required();
    sct->add_option("--jobs", sct_jobs, "parallel cameras");

    // zones
    auto* zones = app.add_subcommand("zones", "infer entry/exit/traffic-aware zones");
    std::string zones_in, zones_config, zones_from_sct, zones_out;
    int zones_jobs = 1;
    zones->add_option("--in", zones_in, "input directory")->required();
    zones->add_option("--config", zones_config, "pipeline config JSON");
    zones->add_option("--from-sct", zones_from_sct, "reuse an SCT CSV instead of tracking");
    zones->add_option("--out", zones_out, "output CSV")->required();
    zones->add_option("--jobs", zones_jobs, "parallel cameras");

    // clm-train
    auto* clm = app.add_subcommand("clm-train", "learn the camera link model");
    std::string clm_gt, clm_config, clm_out;
    clm->add_option("--gt", clm_gt, "ground-truth CSV")->required();
    clm->add_option("--config", clm_config, "pipeline config JSON");
    clm->add_option("--out", clm_out, "output model JSON")->required();

    // track
    auto* track = app.add_subcommand("track", "full multi-camera tracking");
    std::string track_in, track_config, track_clm, track_from_sct, track_zones, track_out;
    int track_jobs = 1;
    track->add_option("--in", track_in, "input directory")->required();
    track->add_option("--config", track_config, "pipeline config JSON");
    track->add_option("--clm", track_clm, "camera link model JSON");
    track->add_option("--from-sct", track_from_sct, "reuse an SCT CSV instead of tracking");
    track->add_option("--zones", track_zones, "pin zones from a zones CSV");
    track->add_option("--out", track_out, "output directory")->required();
    track->add_option("--jobs", track_jobs, "parallel cameras");

    // eval
    auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
    std::string eval_pred, eval_gt, eval_out, eval_per_camera;
    double eval_delta = 0.5;
    eval->add_option("--pred", eval_pred, "predicted tracks CSV")->required();
    eval->add_option("--gt", eval_gt, "ground-truth CSV")->required();
    eval->add_option("--delta", eval_delta, "IOU match threshold");
    eval->add_option("--out", eval_out, "also write the JSON report here");
    eval->add_option("--per-camera", eval_per_camera, "per-camera breakdown CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    }

    try {
        if (synth->parsed()) return run_synth(synth_spec, synth_out, synth_seed);
        if (sct->parsed()) return run_sct_cmd(sct_in, sct_config, sct_out, sct_jobs);
        if (zones->parsed())
            return run_zones_cmd(zones_in, zones_config, zones_from_sct, zones_out, zones_jobs);
        if (clm->parsed()) return run_clm_train(clm_gt, clm_config, clm_out);
        if (track->parsed())
            return run_track_cmd(track_in, track_config, track_clm, track_from_sct, track_zones,
                                 track_out, track_jobs);
        if (eval->parsed())
            return run_eval_cmd(eval_pred, eval_gt, eval_delta, eval_out, eval_per_camera);
    } catch (const mtmc::ParseError& e) {
        std::cerr << "error: parse: " << e.what() << "\n";
        return 1;
    } catch (const mtmc::ValidationError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: json: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
