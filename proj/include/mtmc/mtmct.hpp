#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "mtmc/clm.hpp"
#include "mtmc/features.hpp"
#include "mtmc/types.hpp"

namespace mtmc {

constexpr double kExcluded = std::numeric_limits<double>::infinity();

struct TrajSpan {
    int camera_id = 0;
    std::int64_t first_frame = 0;
    std::int64_t last_frame = 0;

    bool overlaps(const TrajSpan& o) const {
        return camera_id == o.camera_id && first_frame <= o.last_frame &&
               o.first_frame <= last_frame;
    }
};

/// Symmetric trajectory-pair distance table; infinity marks pairs excluded by
/// the camera-link constraints (and the diagonal / same-camera pairs).
struct DistanceMatrix {
    std::vector<TrajKey> keys;
    std::vector<TrajSpan> spans;
    std::vector<double> data;
    std::size_t n = 0;

    void init(std::size_t size) {
        n = size;
        data.assign(n * n, kExcluded);
    }
    double at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
    void set(std::size_t i, std::size_t j, double v) {
        data[i * n + j] = v;
        data[j * n + i] = v;
    }
};

struct PairLinkInfo {
    int link_index = -1;  // into CameraLinkModel::links
    LinkMatch match;
};

/// Link attribution for matrix entries that passed a camera-link check,
/// keyed by (i, j) with i < j.
struct OrderContext {
    std::map<std::pair<std::size_t, std::size_t>, PairLinkInfo> by_pair;
};

struct MatrixStats {
    std::int64_t cross_camera_pairs = 0;
    std::int64_t valid_pairs = 0;
};

struct BuiltMatrix {
    DistanceMatrix matrix;
    OrderContext order;
    MatrixStats stats;
};

/// Fused-feature distances for all cross-camera trajectory pairs that pass
/// the camera-link constraint in either direction; everything else is
/// excluded. Without a model every cross-camera pair is admitted.
inline BuiltMatrix build_distance_matrix(const std::vector<Trajectory>& trajectories,
                                         const std::vector<TrajZoneProfile>& profiles,
                                         const CameraLinkModel* model) {
    if (!profiles.empty() && profiles.size() != trajectories.size())
        throw ValidationError("build_distance_matrix: profile/trajectory count mismatch");
    BuiltMatrix out;
    DistanceMatrix& m = out.matrix;
    m.init(trajectories.size());
    m.keys.reserve(trajectories.size());
    for (const Trajectory& t : trajectories) {
        if (t.fused_feature.empty())
            throw ValidationError("build_distance_matrix: trajectory (camera " +
                                  std::to_string(t.camera_id) + ", id " +
                                  std::to_string(t.local_id) + ") has no fused feature");
        m.keys.push_back({t.camera_id, t.local_id});
        m.spans.push_back({t.camera_id, t.first_frame(), t.last_frame()});
    }

    auto link_index_of = [&](const CameraLink* link) {
        return static_cast<int>(link - model->links.data());
    };

    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = i + 1; j < m.n; ++j) {
            if (trajectories[i].camera_id == trajectories[j].camera_id) continue;
            ++out.stats.cross_camera_pairs;
            PairLinkInfo info;
            if (model) {
                const TrajZoneProfile& pi = profiles[i];
                const TrajZoneProfile& pj = profiles[j];
                if (valid_transition(pi, pj, *model)) {
                    const CameraLink* link = model->find_link(pi.key.camera_id, pi.pair_id,
                                                              pj.key.camera_id, pj.pair_id);
                    info.link_index = link_index_of(link);
                    info.match = {pi.exit_time(link->src_zone), pj.entry_time(link->dst_zone)};
                } else if (valid_transition(pj, pi, *model)) {
                    const CameraLink* link = model->find_link(pj.key.camera_id, pj.pair_id,
                                                              pi.key.camera_id, pi.pair_id);
                    info.link_index = link_index_of(link);
                    info.match = {pj.exit_time(link->src_zone), pi.entry_time(link->dst_zone)};
                } else {
                    continue;
                }
                out.order.by_pair[{i, j}] = info;
            }
            ++out.stats.valid_pairs;
            m.set(i, j, pair_distance(trajectories[i].fused_feature,
                                      trajectories[j].fused_feature));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// hierarchical clustering over the constrained matrix
// ---------------------------------------------------------------------------

struct GlobalAssignment {
    std::map<TrajKey, int> global_ids;
    std::map<int, std::vector<LinkMatch>> link_matches;  // link index -> accepted matches
    std::vector<int> labels;                             // matrix order, canonical form
};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

/// Restricted-growth relabeling: cluster indices in order of first appearance.
inline std::vector<int> canonical_labels(const std::vector<int>& raw) {
    std::vector<int> labels(raw.size());
    std::map<int, int> remap;
    int next = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto [it, inserted] = remap.emplace(raw[i], next);
        if (inserted) ++next;
        labels[i] = it->second;
    }
    return labels;
}

}  // namespace detail

/// Greedy agglomerative global-ID assignment: scan the sorted finite matrix
/// entries ascending and merge every pair below `delta` whose merge keeps
/// same-link matches order-consistent and never puts two time-overlapping
/// same-camera trajectories under one identity; rejected entries are
/// excluded. The scan repeats for `iterations` passes over the same order.
inline GlobalAssignment hierarchical_cluster(const DistanceMatrix& m, double delta,
                                             int iterations, const OrderContext& order) {
    struct Entry {
        double value;
        std::size_t i, j;
        bool excluded = false;
    };
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = i + 1; j < m.n; ++j)
            if (std::isfinite(m.at(i, j))) entries.push_back({m.at(i, j), i, j});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tuple(a.value, a.i, a.j) < std::tuple(b.value, b.i, b.j);
    });

    detail::UnionFind uf(m.n);
    std::vector<std::vector<std::size_t>> members(m.n);
    for (std::size_t i = 0; i < m.n; ++i) members[i] = {i};
    std::map<int, std::vector<LinkMatch>> accepted;

    for (int pass = 0; pass < iterations; ++pass) {
        for (Entry& e : entries) {
            if (e.excluded) continue;
            const std::size_t ri = uf.find(e.i), rj = uf.find(e.j);
            if (ri == rj) continue;  // already carries a common global ID
            if (e.value >= delta) {
                e.excluded = true;
                continue;
            }
            bool conflict = false;
            for (std::size_t a : members[ri]) {
                for (std::size_t b : members[rj]) {
                    if (m.spans[a].overlaps(m.spans[b])) {
                        conflict = true;
                        break;
                    }
                }
                if (conflict) break;
            }
            const PairLinkInfo* info = nullptr;
            if (!conflict) {
                auto it = order.by_pair.find({e.i, e.j});
                if (it != order.by_pair.end()) {
                    info = &it->second;
                    for (const LinkMatch& prev : accepted[info->link_index]) {
                        if (!order_consistent(info->match, prev)) {
                            conflict = true;
                            break;
                        }
                    }
                }
            }
            if (conflict) {
                e.excluded = true;
                continue;
            }
            uf.unite(rj, ri);
            members[ri].insert(members[ri].end(), members[rj].begin(), members[rj].end());
            members[rj].clear();
            if (info) accepted[info->link_index].push_back(info->match);
        }
    }

    GlobalAssignment out;
    out.link_matches = std::move(accepted);
    std::vector<int> raw(m.n);
    for (std::size_t i = 0; i < m.n; ++i) raw[i] = static_cast<int>(uf.find(i));
    out.labels = detail::canonical_labels(raw);
    // stable global IDs: clusters numbered by their smallest trajectory key
    std::map<int, TrajKey> cluster_min;
    for (std::size_t i = 0; i < m.n; ++i) {
        auto it = cluster_min.find(out.labels[i]);
        if (it == cluster_min.end() || m.keys[i] < it->second) cluster_min[out.labels[i]] = m.keys[i];
    }
    std::vector<std::pair<TrajKey, int>> ordered(cluster_min.size());
    std::transform(cluster_min.begin(), cluster_min.end(), ordered.begin(),
                   [](const auto& kv) { return std::pair(kv.second, kv.first); });
    std::sort(ordered.begin(), ordered.end());
    std::map<int, int> gid_of_label;
    for (std::size_t g = 0; g < ordered.size(); ++g)
        gid_of_label[ordered[g].second] = static_cast<int>(g) + 1;
    for (std::size_t i = 0; i < m.n; ++i)
        out.global_ids[m.keys[i]] = gid_of_label[out.labels[i]];
    return out;
}

// ---------------------------------------------------------------------------
// exact small-instance oracle for the correlation-clustering program
// ---------------------------------------------------------------------------

/// Objective of a partition under pair weights w_ij = delta - M_ij summed
/// over within-cluster pairs; -infinity when an excluded pair is co-clustered.
inline double partition_objective(const DistanceMatrix& m, double delta,
                                  const std::vector<int>& labels) {
    double total = 0.0;
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = i + 1; j < m.n; ++j) {
            if (labels[i] != labels[j]) continue;
            if (!std::isfinite(m.at(i, j))) return -std::numeric_limits<double>::infinity();
            total += delta - m.at(i, j);
        }
    return total;
}

struct BipResult {
    std::vector<int> labels;  // canonical restricted-growth form
    double objective = 0.0;
};

/// Exhaustive search over all set partitions (n <= 10), maximizing the summed
/// within-cluster weights delta - M_ij with excluded pairs never co-clustered.
/// Transitivity holds structurally; ties pick the lexicographically smallest
/// partition in restricted-growth form.
inline BipResult brute_force_bip(const DistanceMatrix& m, double delta) {
    if (m.n > 10) throw ValidationError("brute_force_bip: limited to n <= 10");
    BipResult best;
    best.objective = -std::numeric_limits<double>::infinity();
    std::vector<int> labels(m.n, 0);

    auto recurse = [&](auto&& self, std::size_t idx, int max_label) -> void {
        if (idx == m.n) {
            const double obj = partition_objective(m, delta, labels);
            if (obj > best.objective ||
                (obj == best.objective && labels < best.labels)) {
                best.objective = obj;
                best.labels = labels;
            }
            return;
        }
        for (int l = 0; l <= max_label + 1; ++l) {
            labels[idx] = l;
            self(self, idx + 1, std::max(max_label, l));
        }
    };
    if (m.n == 0) {
        best.objective = 0.0;
        return best;
    }
    recurse(recurse, 0, -1);
    return best;
}

}  // namespace mtmc
