#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include <json.hpp>

#include "mtmc/assignment.hpp"
#include "mtmc/geometry.hpp"
#include "mtmc/io.hpp"

namespace mtmc {

struct EvalReport {
    double idf1 = 0.0, idp = 0.0, idr = 0.0;
    std::int64_t idtp = 0, idfp = 0, idfn = 0;
    double mota = 0.0, motp = 0.0, recall = 0.0;
    int mostly_tracked = 0;
    std::int64_t false_negatives = 0, false_positives = 0, id_switches = 0;
    double delta = 0.5;
};

namespace detail {

using FrameKey = std::pair<int, std::int64_t>;  // (camera_id, frame)
using IdTrack = std::map<FrameKey, Box>;

inline std::map<int, IdTrack> group_by_identity(const std::vector<TrackRow>& rows) {
    std::map<int, IdTrack> tracks;
    for (const TrackRow& r : rows) tracks[r.id][{r.camera_id, r.frame}] = r.box;
    return tracks;
}

/// Frames where both identities hold boxes that overlap with IOU >= delta.
inline std::int64_t overlap_count(const IdTrack& a, const IdTrack& b, double delta) {
    const IdTrack& small = a.size() <= b.size() ? a : b;
    const IdTrack& large = a.size() <= b.size() ? b : a;
    std::int64_t count = 0;
    for (const auto& [fk, box] : small) {
        auto it = large.find(fk);
        if (it != large.end() && iou(box, it->second) >= delta) ++count;
    }
    return count;
}

}  // namespace detail

/// Identity measures over the optimal one-to-one matching between ground
/// truth and predicted identities. The matching maximizes the number of
/// per-frame box agreements (IOU >= delta), which is exactly the matching
/// that minimizes the total mismatch count.
inline EvalReport idf1(const std::vector<TrackRow>& predicted,
                       const std::vector<TrackRow>& ground_truth, double delta) {
    if (delta <= 0.0 || delta >= 1.0) throw ValidationError("idf1: delta must be in (0,1)");
    EvalReport rep;
    rep.delta = delta;

    const auto gt = detail::group_by_identity(ground_truth);
    const auto pr = detail::group_by_identity(predicted);
    std::vector<const detail::IdTrack*> taus, gammas;
    for (const auto& [id, t] : gt) taus.push_back(&t);
    for (const auto& [id, t] : pr) gammas.push_back(&t);

    std::int64_t gt_len = 0, pr_len = 0;
    for (const auto* t : taus) gt_len += static_cast<std::int64_t>(t->size());
    for (const auto* g : gammas) pr_len += static_cast<std::int64_t>(g->size());

    const std::size_t n = std::max(taus.size(), gammas.size());
    std::int64_t idtp = 0;
    if (n > 0 && !taus.empty() && !gammas.empty()) {
        std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
        for (std::size_t t = 0; t < taus.size(); ++t)
            for (std::size_t g = 0; g < gammas.size(); ++g)
                cost[t][g] = -static_cast<double>(
                    detail::overlap_count(*taus[t], *gammas[g], delta));
        const std::vector<int> match = solve_assignment(cost);
        for (std::size_t t = 0; t < taus.size(); ++t) {
            const std::size_t g = static_cast<std::size_t>(match[t]);
            if (g < gammas.size())
                idtp += detail::overlap_count(*taus[t], *gammas[g], delta);
        }
    }

    rep.idtp = idtp;
    rep.idfn = gt_len - idtp;
    rep.idfp = pr_len - idtp;
    rep.idf1 = (gt_len + pr_len) > 0
                   ? 2.0 * static_cast<double>(idtp) / static_cast<double>(gt_len + pr_len)
                   : 0.0;
    rep.idp = pr_len > 0 ? static_cast<double>(idtp) / static_cast<double>(pr_len) : 0.0;
    rep.idr = gt_len > 0 ? static_cast<double>(idtp) / static_cast<double>(gt_len) : 0.0;
    return rep;
}

/// CLEAR-MOT accounting with per-frame greedy IOU matching that prefers the
/// previous frame's correspondence before filling in by descending IOU.
inline EvalReport clear_mot(const std::vector<TrackRow>& predicted,
                            const std::vector<TrackRow>& ground_truth, double delta) {
    if (delta <= 0.0 || delta >= 1.0) throw ValidationError("clear_mot: delta must be in (0,1)");
    EvalReport rep;
    rep.delta = delta;

    struct FrameData {
        std::vector<std::pair<int, Box>> gt, pred;  // (identity, box)
    };
    std::map<detail::FrameKey, FrameData> frames;
    for (const TrackRow& r : ground_truth) frames[{r.camera_id, r.frame}].gt.push_back({r.id, r.box});
    for (const TrackRow& r : predicted) frames[{r.camera_id, r.frame}].pred.push_back({r.id, r.box});

    std::map<std::pair<int, int>, int> last_match;  // (camera, gt id) -> pred id
    std::map<int, std::int64_t> gt_boxes_per_id, matched_per_id;
    std::int64_t total_gt = 0, matches = 0, fp = 0, fn = 0, idsw = 0;
    double iou_sum = 0.0;

    for (auto& [fk, fd] : frames) {
        auto by_id = [](const std::pair<int, Box>& a, const std::pair<int, Box>& b) {
            return a.first < b.first;
        };
        std::sort(fd.gt.begin(), fd.gt.end(), by_id);
        std::sort(fd.pred.begin(), fd.pred.end(), by_id);
        total_gt += static_cast<std::int64_t>(fd.gt.size());
        for (const auto& [gid, box] : fd.gt) ++gt_boxes_per_id[gid];

        std::vector<bool> gt_used(fd.gt.size(), false), pred_used(fd.pred.size(), false);
        std::vector<std::pair<std::size_t, std::size_t>> pairs;

        // continuity: keep last frame's correspondence when it still holds
        for (std::size_t g = 0; g < fd.gt.size(); ++g) {
            auto it = last_match.find({fk.first, fd.gt[g].first});
            if (it == last_match.end()) continue;
            for (std::size_t p = 0; p < fd.pred.size(); ++p) {
                if (pred_used[p] || fd.pred[p].first != it->second) continue;
                if (iou(fd.gt[g].second, fd.pred[p].second) >= delta) {
                    gt_used[g] = true;
                    pred_used[p] = true;
                    pairs.push_back({g, p});
                }
                break;
            }
        }
        // fill in by descending IOU
        struct Cand {
            double overlap;
            std::size_t g, p;
        };
        std::vector<Cand> cands;
        for (std::size_t g = 0; g < fd.gt.size(); ++g) {
            if (gt_used[g]) continue;
            for (std::size_t p = 0; p < fd.pred.size(); ++p) {
                if (pred_used[p]) continue;
                const double o = iou(fd.gt[g].second, fd.pred[p].second);
                if (o >= delta) cands.push_back({o, g, p});
            }
        }
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            if (a.overlap != b.overlap) return a.overlap > b.overlap;
            return std::pair(a.g, a.p) < std::pair(b.g, b.p);
        });
        for (const Cand& c : cands) {
            if (gt_used[c.g] || pred_used[c.p]) continue;
            gt_used[c.g] = true;
            pred_used[c.p] = true;
            pairs.push_back({c.g, c.p});
        }

        for (const auto& [g, p] : pairs) {
            ++matches;
            iou_sum += iou(fd.gt[g].second, fd.pred[p].second);
            ++matched_per_id[fd.gt[g].first];
            const std::pair<int, int> key{fk.first, fd.gt[g].first};
            auto it = last_match.find(key);
            if (it != last_match.end() && it->second != fd.pred[p].first) ++idsw;
            last_match[key] = fd.pred[p].first;
        }
        for (std::size_t g = 0; g < fd.gt.size(); ++g)
            if (!gt_used[g]) ++fn;
        for (std::size_t p = 0; p < fd.pred.size(); ++p)
            if (!pred_used[p]) ++fp;
    }

    rep.false_negatives = fn;
    rep.false_positives = fp;
    rep.id_switches = idsw;
    rep.mota = total_gt > 0
                   ? 1.0 - static_cast<double>(fn + fp + idsw) / static_cast<double>(total_gt)
                   : 0.0;
    rep.motp = matches > 0 ? iou_sum / static_cast<double>(matches) : 0.0;
    rep.recall = total_gt > 0 ? static_cast<double>(matches) / static_cast<double>(total_gt) : 0.0;
    for (const auto& [gid, len] : gt_boxes_per_id) {
        const std::int64_t m = matched_per_id.count(gid) ? matched_per_id[gid] : 0;
        if (static_cast<double>(m) >= 0.8 * static_cast<double>(len)) ++rep.mostly_tracked;
    }
    return rep;
}

/// Identity and CLEAR-MOT measures combined into one report.
inline EvalReport evaluate(const std::vector<TrackRow>& predicted,
                           const std::vector<TrackRow>& ground_truth, double delta) {
    EvalReport rep = idf1(predicted, ground_truth, delta);
    const EvalReport mot = clear_mot(predicted, ground_truth, delta);
    rep.mota = mot.mota;
    rep.motp = mot.motp;
    rep.recall = mot.recall;
    rep.mostly_tracked = mot.mostly_tracked;
    rep.false_negatives = mot.false_negatives;
    rep.false_positives = mot.false_positives;
    rep.id_switches = mot.id_switches;
    return rep;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
    return {{"IDF1", r.idf1},     {"IDP", r.idp},
            {"IDR", r.idr},       {"IDTP", r.idtp},
            {"IDFP", r.idfp},     {"IDFN", r.idfn},
            {"MOTA", r.mota},     {"MOTP", r.motp},
            {"Recall", r.recall}, {"MT", r.mostly_tracked},
            {"FN", r.false_negatives}, {"FP", r.false_positives},
            {"IDSW", r.id_switches},   {"delta", r.delta}};
}

/// Cameras present in the predictions but unknown to the ground truth are a
/// data mix-up; report them all at once.
inline void check_camera_sets(const std::vector<TrackRow>& predicted,
                              const std::vector<TrackRow>& ground_truth) {
    std::set<int> gt_cams, extra;
    for (const TrackRow& r : ground_truth) gt_cams.insert(r.camera_id);
    for (const TrackRow& r : predicted)
        if (!gt_cams.count(r.camera_id)) extra.insert(r.camera_id);
    if (extra.empty()) return;
    std::string msg = "predictions reference cameras absent from ground truth:";
    for (int c : extra) msg += " " + std::to_string(c);
    throw ValidationError(msg);
}

}  // namespace mtmc
