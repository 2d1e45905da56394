#include "gridmotion/clustering.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace gmc {

int ClusterInfo::support() const {
    int s = 0;
    for (const auto& c : claims) s += c.support;
    return s;
}

std::size_t ClusterInfo::member_count() const {
    std::size_t n = 0;
    for (const auto& c : claims) n += c.members.size();
    return n;
}

std::vector<int> ClusterInfo::cells() const {
    std::vector<int> out;
    out.reserve(claims.size());
    for (const auto& c : claims) out.push_back(c.cell_id);
    return out;
}

std::vector<int> ClusterInfo::members() const {
    std::vector<int> out;
    out.reserve(member_count());
    for (const auto& c : claims)
        out.insert(out.end(), c.members.begin(), c.members.end());
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

void rebuild_cell_owners(ClusterMap& cm) {
    cm.cell_to_cluster.clear();
    // Owner = highest cluster support, ties to the lower cluster id.
    std::map<int, std::pair<int, int>> best; // cell -> (support, cluster id)
    for (const auto& cl : cm.clusters) {
        const int s = cl.support();
        for (const auto& claim : cl.claims) {
            auto it = best.find(claim.cell_id);
            if (it == best.end() || s > it->second.first ||
                (s == it->second.first && cl.id < it->second.second)) {
                best[claim.cell_id] = {s, cl.id};
            }
        }
    }
    for (const auto& [cell, owner] : best)
        cm.cell_to_cluster[cell] = owner.second;
}

} // namespace

ClusterMap merge_clusters(std::span<const CellDecision> decisions,
                          const PassGrid& grid, const GridConfig&) {
    // Aggregate dynamic leaves per (bin, cell). Quadtree leaves of one cell
    // that agree on the pattern merge into a single claim.
    struct CellAgg {
        int support = 0;
        std::vector<int> members;
    };
    std::map<MotionBin, std::map<int, CellAgg>> by_bin;
    int pass_id = 0;
    for (const auto& d : decisions) {
        if (d.verdict != Verdict::Dynamic) continue;
        if (d.bin.is_static())
            throw Error("merge_clusters: dynamic decision with static bin");
        pass_id = d.provenance.pass_id;
        CellAgg& agg = by_bin[d.bin][d.cell_id];
        agg.support += d.support;
        agg.members.insert(agg.members.end(), d.winning_members.begin(),
                           d.winning_members.end());
    }

    ClusterMap cm;
    for (auto& [bin, cells] : by_bin) {
        // Seeds in decreasing support order, then ascending cell id.
        std::vector<int> seeds;
        seeds.reserve(cells.size());
        for (const auto& [cell, agg] : cells) seeds.push_back(cell);
        std::sort(seeds.begin(), seeds.end(), [&](int a, int b) {
            const int sa = cells.at(a).support, sb = cells.at(b).support;
            if (sa != sb) return sa > sb;
            return a < b;
        });

        std::set<int> visited;
        for (int seed : seeds) {
            if (visited.count(seed)) continue;
            ClusterInfo cl;
            cl.id = static_cast<int>(cm.clusters.size());
            cl.pass_id = pass_id;
            cl.bin = bin;

            std::deque<int> frontier{seed};
            visited.insert(seed);
            std::vector<int> component;
            while (!frontier.empty()) {
                const int cell = frontier.front();
                frontier.pop_front();
                component.push_back(cell);
                const int col = cell % grid.cols;
                const int row = cell / grid.cols;
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) continue;
                        const int nc = col + dc, nr = row + dr;
                        if (nc < 0 || nc >= grid.cols || nr < 0 || nr >= grid.rows)
                            continue;
                        const int neighbor = nr * grid.cols + nc;
                        if (visited.count(neighbor) || !cells.count(neighbor))
                            continue;
                        visited.insert(neighbor);
                        frontier.push_back(neighbor);
                    }
                }
            }
            std::sort(component.begin(), component.end());
            for (int cell : component) {
                auto& agg = cells.at(cell);
                std::sort(agg.members.begin(), agg.members.end());
                cl.claims.push_back({cell, agg.support, std::move(agg.members)});
            }
            cm.clusters.push_back(std::move(cl));
        }
    }
    rebuild_cell_owners(cm);
    return cm;
}

ClusterMap eliminate_small(ClusterMap cm, int min_cluster_features) {
    std::vector<ClusterInfo> kept;
    kept.reserve(cm.clusters.size());
    for (auto& cl : cm.clusters) {
        if (static_cast<int>(cl.member_count()) >= min_cluster_features)
            kept.push_back(std::move(cl));
    }
    cm.clusters = std::move(kept);
    rebuild_cell_owners(cm);
    return cm;
}

ClusterMap suppress_duplicates(ClusterMap cm) {
    rebuild_cell_owners(cm);
    std::vector<ClusterInfo> kept;
    kept.reserve(cm.clusters.size());
    for (auto& cl : cm.clusters) {
        std::vector<ClusterCellClaim> surviving;
        for (auto& claim : cl.claims) {
            if (cm.cell_to_cluster.at(claim.cell_id) == cl.id)
                surviving.push_back(std::move(claim));
        }
        cl.claims = std::move(surviving);
        if (!cl.claims.empty()) kept.push_back(std::move(cl));
    }
    cm.clusters = std::move(kept);
    rebuild_cell_owners(cm);
    return cm;
}

const LabelEntry& LabelMap::at(int id) const {
    const auto it = entries.find(id);
    if (it == entries.end())
        throw Error("LabelMap: unknown correspondence id " + std::to_string(id));
    return it->second;
}

LabelEntry& LabelMap::at(int id) {
    const auto it = entries.find(id);
    if (it == entries.end())
        throw Error("LabelMap: unknown correspondence id " + std::to_string(id));
    return it->second;
}

LabelMap label_matches(const ClusterMap& cm,
                       std::span<const CellDecision> decisions,
                       std::span<const Correspondence> matches) {
    LabelMap lm;
    lm.ids.reserve(matches.size());
    lm.entries.reserve(matches.size());
    for (const auto& m : matches) {
        if (!lm.entries.emplace(m.id, LabelEntry{}).second)
            throw Error("label_matches: duplicate correspondence id " +
                        std::to_string(m.id));
        lm.ids.push_back(m.id);
    }

    for (const auto& d : decisions) {
        LabelEntry base;
        base.label = d.verdict == Verdict::Unknown ? Label::Unknown : Label::Static;
        base.bin = d.bin;
        base.provenance = d.provenance;
        base.support = d.support;
        base.n = d.n;
        for (int id : d.members) {
            auto it = lm.entries.find(id);
            if (it == lm.entries.end())
                throw Error("label_matches: decision references unknown id " +
                            std::to_string(id));
            it->second = base;
        }
    }

    // Surviving cluster members override to Dynamic. Members whose cluster
    // was eliminated or lost its cell keep the Static default from above.
    for (const auto& cl : cm.clusters) {
        for (const auto& claim : cl.claims) {
            for (int id : claim.members) {
                auto it = lm.entries.find(id);
                if (it == lm.entries.end())
                    throw Error("label_matches: cluster references unknown id " +
                                std::to_string(id));
                it->second.label = Label::Dynamic;
                it->second.cluster_id = cl.id;
                it->second.bin = cl.bin;
            }
        }
    }
    return lm;
}

} // namespace gmc
