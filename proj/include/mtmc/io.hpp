#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mtmc/config.hpp"
#include "mtmc/errors.hpp"
#include "mtmc/types.hpp"

namespace mtmc {

// ---------------------------------------------------------------------------
// numeric text
// ---------------------------------------------------------------------------

/// Locale-independent rendering at 6 significant digits; the canonical float
/// format of every file this project writes.
inline std::string format_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline double parse_double(std::string_view tok, const std::string& file, std::size_t line) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last)
        throw ParseError(file, line, "not a number: '" + std::string(tok) + "'");
    return v;
}

inline std::int64_t parse_int(std::string_view tok, const std::string& file, std::size_t line) {
    std::int64_t v = 0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last)
        throw ParseError(file, line, "not an integer: '" + std::string(tok) + "'");
    return v;
}

// ---------------------------------------------------------------------------
// file and line helpers
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << content;
}

inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        if (end == text.size()) break;
        start = end + 1;
    }
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t end = line.find(',', start);
        std::string_view tok = (end == std::string_view::npos)
                                   ? line.substr(start)
                                   : line.substr(start, end - start);
        while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
        while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.remove_suffix(1);
        out.push_back(tok);
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

inline bool is_blank(const std::string& line) {
    return line.find_first_not_of(" \t") == std::string::npos;
}

// ---------------------------------------------------------------------------
// detections: `frame,det_index,x,y,w,h[,confidence]`
// ---------------------------------------------------------------------------

inline std::vector<Detection> parse_detections(const std::string& path, int camera_id) {
    const auto lines = split_lines(read_text_file(path));
    std::vector<Detection> dets;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (is_blank(lines[i])) continue;
        const auto f = split_csv(lines[i]);
        if (f.size() != 6 && f.size() != 7)
            throw ParseError(path, i + 1, "expected 6 or 7 fields, got " + std::to_string(f.size()));
        Detection d;
        d.camera_id = camera_id;
        d.frame = parse_int(f[0], path, i + 1);
        d.det_index = static_cast<int>(parse_int(f[1], path, i + 1));
        d.box = {parse_double(f[2], path, i + 1), parse_double(f[3], path, i + 1),
                 parse_double(f[4], path, i + 1), parse_double(f[5], path, i + 1)};
        d.confidence = f.size() == 7 ? parse_double(f[6], path, i + 1) : 1.0;
        if (d.box.w <= 0.0 || d.box.h <= 0.0)
            throw ValidationError(path + ":" + std::to_string(i + 1) + ": non-positive box size");
        if (d.confidence < 0.0 || d.confidence > 1.0)
            throw ValidationError(path + ":" + std::to_string(i + 1) + ": confidence outside [0,1]");
        dets.push_back(d);
    }
    std::sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
        return std::pair(a.frame, a.det_index) < std::pair(b.frame, b.det_index);
    });
    for (std::size_t i = 1; i < dets.size(); ++i)
        if (dets[i].frame == dets[i - 1].frame && dets[i].det_index == dets[i - 1].det_index)
            throw ValidationError(path + ": duplicate detection key (frame " +
                                  std::to_string(dets[i].frame) + ", det " +
                                  std::to_string(dets[i].det_index) + ")");
    return dets;
}

inline std::string serialize_detections(const std::vector<Detection>& dets) {
    std::string out;
    for (const Detection& d : dets) {
        out += std::to_string(d.frame) + "," + std::to_string(d.det_index) + "," +
               format_num(d.box.x) + "," + format_num(d.box.y) + "," + format_num(d.box.w) +
               "," + format_num(d.box.h) + "," + format_num(d.confidence) + "\n";
    }
    return out;
}

/// Shift detection frames from the camera-local clock to the global clock.
inline void apply_frame_offset(std::vector<Detection>& dets, std::int64_t offset) {
    for (Detection& d : dets) d.frame += offset;
}

// ---------------------------------------------------------------------------
// embeddings: header `dim=<D>`, rows `frame,det_index,v1,...,vD`
// ---------------------------------------------------------------------------

inline EmbeddingTable parse_embeddings(const std::string& path, int camera_id,
                                       const std::vector<Detection>& detections) {
    const auto lines = split_lines(read_text_file(path));
    if (lines.empty()) throw ParseError(path, 1, "missing 'dim=<D>' header");
    const std::string& header = lines[0];
    if (header.rfind("dim=", 0) != 0) throw ParseError(path, 1, "missing 'dim=<D>' header");
    EmbeddingTable table;
    table.dim = static_cast<int>(parse_int(std::string_view(header).substr(4), path, 1));
    if (table.dim <= 0) throw ParseError(path, 1, "dim must be positive");

    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (is_blank(lines[i])) continue;
        const auto f = split_csv(lines[i]);
        if (static_cast<int>(f.size()) != table.dim + 2)
            throw ValidationError(path + ":" + std::to_string(i + 1) + ": expected " +
                                  std::to_string(table.dim) + " values, got " +
                                  std::to_string(static_cast<int>(f.size()) - 2));
        DetKey k{camera_id, parse_int(f[0], path, i + 1),
                 static_cast<int>(parse_int(f[1], path, i + 1))};
        Vec v(table.dim);
        for (int d = 0; d < table.dim; ++d) {
            v[d] = parse_double(f[d + 2], path, i + 1);
            if (!std::isfinite(v[d]))
                throw ValidationError(path + ":" + std::to_string(i + 1) + ": non-finite value");
        }
        if (!table.rows.emplace(k, std::move(v)).second)
            throw ValidationError(path + ":" + std::to_string(i + 1) + ": duplicate key (frame " +
                                  std::to_string(k.frame) + ", det " +
                                  std::to_string(k.det_index) + ")");
    }
    for (const Detection& d : detections) {
        if (!table.rows.count(key_of(d)))
            throw ValidationError(path + ": coverage error: no row for (frame " +
                                  std::to_string(d.frame) + ", det " +
                                  std::to_string(d.det_index) + ")");
    }
    return table;
}

inline std::string serialize_embeddings(const EmbeddingTable& table) {
    std::string out = "dim=" + std::to_string(table.dim) + "\n";
    std::vector<DetKey> keys;
    keys.reserve(table.rows.size());
    for (const auto& [k, v] : table.rows) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (const DetKey& k : keys) {
        out += std::to_string(k.frame) + "," + std::to_string(k.det_index);
        for (double v : table.rows.at(k)) out += "," + format_num(v);
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// metadata: header `attribute=<name>,classes=<K>`, rows `frame,det_index,p1..pK`
// ---------------------------------------------------------------------------

inline MetadataTable parse_metadata(const std::string& path, int camera_id,
                                    const std::vector<Detection>& detections) {
    const auto lines = split_lines(read_text_file(path));
    if (lines.empty()) throw ParseError(path, 1, "missing 'attribute=<name>,classes=<K>' header");
    const auto hf = split_csv(lines[0]);
    if (hf.size() != 2 || hf[0].rfind("attribute=", 0) != 0 || hf[1].rfind("classes=", 0) != 0)
        throw ParseError(path, 1, "missing 'attribute=<name>,classes=<K>' header");
    MetadataTable table;
    table.attribute = std::string(hf[0].substr(10));
    table.class_count = static_cast<int>(parse_int(hf[1].substr(8), path, 1));
    if (table.class_count <= 0) throw ParseError(path, 1, "classes must be positive");

    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (is_blank(lines[i])) continue;
        const auto f = split_csv(lines[i]);
        if (static_cast<int>(f.size()) != table.class_count + 2)
            throw ValidationError(path + ":" + std::to_string(i + 1) + ": expected " +
                                  std::to_string(table.class_count) + " probabilities");
        DetKey k{camera_id, parse_int(f[0], path, i + 1),
                 static_cast<int>(parse_int(f[1], path, i + 1))};
        Vec v(table.class_count);
        double sum = 0.0;
        for (int d = 0; d < table.class_count; ++d) {
            v[d] = parse_double(f[d + 2], path, i + 1);
            if (v[d] < 0.0)
                throw ValidationError(path + ":" + std::to_string(i + 1) + ": negative probability");
            sum += v[d];
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw ValidationError(path + ":" + std::to_string(i + 1) +
                                  ": probabilities sum to " + format_num(sum));
        if (!table.rows.emplace(k, std::move(v)).second)
            throw ValidationError(path + ":" + std::to_string(i + 1) + ": duplicate key");
    }
    for (const Detection& d : detections) {
        if (!table.rows.count(key_of(d)))
            throw ValidationError(path + ": coverage error: no " + table.attribute +
                                  " row for (frame " + std::to_string(d.frame) + ", det " +
                                  std::to_string(d.det_index) + ")");
    }
    return table;
}

inline std::string serialize_metadata(const MetadataTable& table) {
    std::string out = "attribute=" + table.attribute + ",classes=" +
                      std::to_string(table.class_count) + "\n";
    std::vector<DetKey> keys;
    keys.reserve(table.rows.size());
    for (const auto& [k, v] : table.rows) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (const DetKey& k : keys) {
        out += std::to_string(k.frame) + "," + std::to_string(k.det_index);
        for (double v : table.rows.at(k)) out += "," + format_num(v);
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// track rows: `camera_id,frame,id,x,y,w,h` (SCT local ids or global ids)
// ---------------------------------------------------------------------------

struct TrackRow {
    int camera_id = 0;
    std::int64_t frame = 0;
    int id = 0;
    Box box;
};

inline std::vector<TrackRow> parse_tracks(const std::string& path) {
    const auto lines = split_lines(read_text_file(path));
    std::vector<TrackRow> rows;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (is_blank(lines[i])) continue;
        const auto f = split_csv(lines[i]);
        if (f.size() != 7)
            throw ParseError(path, i + 1, "expected 7 fields, got " + std::to_string(f.size()));
        TrackRow r;
        r.camera_id = static_cast<int>(parse_int(f[0], path, i + 1));
        r.frame = parse_int(f[1], path, i + 1);
        r.id = static_cast<int>(parse_int(f[2], path, i + 1));
        r.box = {parse_double(f[3], path, i + 1), parse_double(f[4], path, i + 1),
                 parse_double(f[5], path, i + 1), parse_double(f[6], path, i + 1)};
        if (r.box.w <= 0.0 || r.box.h <= 0.0)
            throw ValidationError(path + ":" + std::to_string(i + 1) + ": non-positive box size");
        rows.push_back(r);
    }
    std::sort(rows.begin(), rows.end(), [](const TrackRow& a, const TrackRow& b) {
        return std::tuple(a.camera_id, a.frame, a.id) < std::tuple(b.camera_id, b.frame, b.id);
    });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const TrackRow &a = rows[i - 1], &b = rows[i];
        if (a.camera_id == b.camera_id && a.frame == b.frame && a.id == b.id)
            throw ValidationError(path + ": duplicate row for (camera " +
                                  std::to_string(a.camera_id) + ", frame " +
                                  std::to_string(a.frame) + ", id " + std::to_string(a.id) +
                                  ")");
    }
    return rows;
}

inline std::string serialize_tracks(std::vector<TrackRow> rows) {
    std::sort(rows.begin(), rows.end(), [](const TrackRow& a, const TrackRow& b) {
        return std::tuple(a.camera_id, a.frame, a.id) < std::tuple(b.camera_id, b.frame, b.id);
    });
    std::string out;
    for (const TrackRow& r : rows) {
        out += std::to_string(r.camera_id) + "," + std::to_string(r.frame) + "," +
               std::to_string(r.id) + "," + format_num(r.box.x) + "," + format_num(r.box.y) +
               "," + format_num(r.box.w) + "," + format_num(r.box.h) + "\n";
    }
    return out;
}

inline std::vector<TrackRow> trajectories_to_rows(const std::vector<Trajectory>& trajs) {
    std::vector<TrackRow> rows;
    for (const Trajectory& t : trajs)
        for (const Detection& d : t.detections)
            rows.push_back({t.camera_id, d.frame, t.local_id, d.box});
    return rows;
}

// ---------------------------------------------------------------------------
// ground truth: `camera_id,frame,global_id,x,y,w,h`
// ---------------------------------------------------------------------------

struct GroundTruth {
    // global_id -> camera_id -> detections sorted by frame
    std::map<int, std::map<int, std::vector<Detection>>> by_id;

    std::vector<TrackRow> rows() const {
        std::vector<TrackRow> out;
        for (const auto& [gid, cams] : by_id)
            for (const auto& [cam, dets] : cams)
                for (const Detection& d : dets) out.push_back({cam, d.frame, gid, d.box});
        return out;
    }
};

inline GroundTruth parse_ground_truth(const std::string& path) {
    const auto lines = split_lines(read_text_file(path));
    GroundTruth gt;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (is_blank(lines[i])) continue;
        const auto f = split_csv(lines[i]);
        if (f.size() != 7)
            throw ParseError(path, i + 1, "expected 7 fields, got " + std::to_string(f.size()));
        const int cam = static_cast<int>(parse_int(f[0], path, i + 1));
        const std::int64_t frame = parse_int(f[1], path, i + 1);
        const int gid = static_cast<int>(parse_int(f[2], path, i + 1));
        Detection d;
        d.camera_id = cam;
        d.frame = frame;
        d.det_index = 0;
        d.box = {parse_double(f[3], path, i + 1), parse_double(f[4], path, i + 1),
                 parse_double(f[5], path, i + 1), parse_double(f[6], path, i + 1)};
        if (d.box.w <= 0.0 || d.box.h <= 0.0)
            throw ValidationError(path + ":" + std::to_string(i + 1) + ": non-positive box size");
        gt.by_id[gid][cam].push_back(d);
    }
    for (auto& [gid, cams] : gt.by_id) {
        for (auto& [cam, dets] : cams) {
            std::sort(dets.begin(), dets.end(),
                      [](const Detection& a, const Detection& b) { return a.frame < b.frame; });
            for (std::size_t i = 1; i < dets.size(); ++i)
                if (dets[i].frame == dets[i - 1].frame)
                    throw ValidationError(path + ": duplicate ground-truth frame " +
                                          std::to_string(dets[i].frame) + " for id " +
                                          std::to_string(gid) + " in camera " +
                                          std::to_string(cam));
        }
    }
    return gt;
}

inline std::string serialize_ground_truth(const GroundTruth& gt) {
    std::vector<TrackRow> rows = gt.rows();
    return serialize_tracks(std::move(rows));
}

// ---------------------------------------------------------------------------
// wheel keypoints: `camera_id,frame,det_index,xfl,yfl,xfr,yfr,xbl,ybl,xbr,ybr`
// ---------------------------------------------------------------------------

struct WheelKeypoints {
    Point2 front_left, front_right, back_left, back_right;
};

using KeypointTable = std::map<DetKey, WheelKeypoints>;

inline KeypointTable parse_keypoints(const std::string& path) {
    const auto lines = split_lines(read_text_file(path));
    KeypointTable table;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (is_blank(lines[i])) continue;
        const auto f = split_csv(lines[i]);
        if (f.size() != 11)
            throw ParseError(path, i + 1, "expected 11 fields, got " + std::to_string(f.size()));
        DetKey k{static_cast<int>(parse_int(f[0], path, i + 1)), parse_int(f[1], path, i + 1),
                 static_cast<int>(parse_int(f[2], path, i + 1))};
        WheelKeypoints w;
        double v[8];
        for (int d = 0; d < 8; ++d) {
            v[d] = parse_double(f[d + 3], path, i + 1);
            if (!std::isfinite(v[d]))
                throw ValidationError(path + ":" + std::to_string(i + 1) + ": non-finite keypoint");
        }
        w.front_left = {v[0], v[1]};
        w.front_right = {v[2], v[3]};
        w.back_left = {v[4], v[5]};
        w.back_right = {v[6], v[7]};
        if (!table.emplace(k, w).second)
            throw ValidationError(path + ":" + std::to_string(i + 1) + ": duplicate keypoint key");
    }
    return table;
}

inline std::string serialize_keypoints(const KeypointTable& table) {
    std::string out;
    for (const auto& [k, w] : table) {
        out += std::to_string(k.camera_id) + "," + std::to_string(k.frame) + "," +
               std::to_string(k.det_index);
        for (const Point2& p : {w.front_left, w.front_right, w.back_left, w.back_right})
            out += "," + format_num(p.x) + "," + format_num(p.y);
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// zones: `camera_id,zone_id,class,x,y,w,h,n_entry,n_exit`
// ---------------------------------------------------------------------------

inline std::vector<Zone> parse_zones(const std::string& path) {
    const auto lines = split_lines(read_text_file(path));
    std::vector<Zone> zones;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (is_blank(lines[i])) continue;
        const auto f = split_csv(lines[i]);
        if (f.size() != 9)
            throw ParseError(path, i + 1, "expected 9 fields, got " + std::to_string(f.size()));
        Zone z;
        z.camera_id = static_cast<int>(parse_int(f[0], path, i + 1));
        z.zone_id = static_cast<int>(parse_int(f[1], path, i + 1));
        z.cls = zone_class_from_string(std::string(f[2]));
        z.bbox = {parse_double(f[3], path, i + 1), parse_double(f[4], path, i + 1),
                  parse_double(f[5], path, i + 1), parse_double(f[6], path, i + 1)};
        z.n_entry = static_cast<int>(parse_int(f[7], path, i + 1));
        z.n_exit = static_cast<int>(parse_int(f[8], path, i + 1));
        zones.push_back(z);
    }
    return zones;
}

inline std::string serialize_zones(std::vector<Zone> zones) {
    std::sort(zones.begin(), zones.end(), [](const Zone& a, const Zone& b) {
        return std::pair(a.camera_id, a.zone_id) < std::pair(b.camera_id, b.zone_id);
    });
    std::string out;
    for (const Zone& z : zones) {
        out += std::to_string(z.camera_id) + "," + std::to_string(z.zone_id) + "," +
               to_string(z.cls) + "," + format_num(z.bbox.x) + "," + format_num(z.bbox.y) + "," +
               format_num(z.bbox.w) + "," + format_num(z.bbox.h) + "," +
               std::to_string(z.n_entry) + "," + std::to_string(z.n_exit) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// fused features: `camera_id,local_id,v1,...,vD`
// ---------------------------------------------------------------------------

inline std::string serialize_fused_features(const std::vector<Trajectory>& trajs) {
    std::vector<const Trajectory*> sorted;
    for (const Trajectory& t : trajs) sorted.push_back(&t);
    std::sort(sorted.begin(), sorted.end(), [](const Trajectory* a, const Trajectory* b) {
        return std::pair(a->camera_id, a->local_id) < std::pair(b->camera_id, b->local_id);
    });
    std::string out;
    for (const Trajectory* t : sorted) {
        out += std::to_string(t->camera_id) + "," + std::to_string(t->local_id);
        for (double v : t->fused_feature) out += "," + format_num(v);
        out += "\n";
    }
    return out;
}

inline PipelineConfig load_config(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return config_from_json(j);
}

}  // namespace mtmc
