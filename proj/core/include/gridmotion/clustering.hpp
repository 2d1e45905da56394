#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "gridmotion/grid.hpp"

namespace gmc {

/// One cell's contribution to a cluster: the winning-pattern support and the
/// correspondence ids it brings in.
struct ClusterCellClaim {
    int cell_id = 0;
    int support = 0;
    std::vector<int> members;
};

struct ClusterInfo {
    int id = 0;
    int pass_id = 0;
    MotionBin bin; // shared motion pattern, never (0,0)
    std::vector<ClusterCellClaim> claims; // sorted by cell_id

    int support() const;
    std::size_t member_count() const;
    std::vector<int> cells() const;
    std::vector<int> members() const;
};

/// Dynamic clusters over one pass's grid. cell_to_cluster maps every claimed
/// cell to its owning cluster id (the highest-support claimant until
/// suppress_duplicates makes ownership exclusive).
struct ClusterMap {
    std::vector<ClusterInfo> clusters;
    std::map<int, int> cell_to_cluster;
};

/// Connected components (8-adjacency) of dynamic cells sharing a motion
/// pattern, seeded in decreasing order of cell support. decisions must all
/// come from the one pass whose geometry is given.
ClusterMap merge_clusters(std::span<const CellDecision> decisions,
                          const PassGrid& grid, const GridConfig& cfg);

/// Drops clusters with fewer than min_cluster_features members; their
/// members revert to Static at labeling time.
ClusterMap eliminate_small(ClusterMap cm, int min_cluster_features);

/// Non-maximum suppression over contested cells: when clusters of different
/// patterns claim the same cell (possible across quadtree levels), the
/// higher-support cluster keeps it; ties go to the lower cluster id. Clusters
/// stripped of every cell are dropped. Idempotent.
ClusterMap suppress_duplicates(ClusterMap cm);

enum class Label : std::uint8_t { Static, Dynamic, Unknown };

struct LabelEntry {
    Label label = Label::Unknown;
    int cluster_id = -1; // valid when label == Dynamic
    MotionBin bin;
    Provenance provenance;
    int support = 0; // winning-pattern count of the deciding leaf
    int n = 0;       // population of the deciding leaf
};

/// Per-correspondence labels, kept in input order.
struct LabelMap {
    std::vector<int> ids;
    std::unordered_map<int, LabelEntry> entries;

    std::size_t size() const { return ids.size(); }
    const LabelEntry& at(int id) const;
    LabelEntry& at(int id);
    bool contains(int id) const { return entries.count(id) != 0; }
};

/// Materializes per-point labels: members of surviving clusters are Dynamic,
/// members of Unknown leaves are Unknown, every other covered member is
/// Static. Correspondences no decision covers stay Unknown.
LabelMap label_matches(const ClusterMap& cm,
                       std::span<const CellDecision> decisions,
                       std::span<const Correspondence> matches);

} // namespace gmc
