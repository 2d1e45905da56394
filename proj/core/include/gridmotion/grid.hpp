#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridmotion/geometry.hpp"
#include "gridmotion/stats.hpp"

namespace gmc {

struct GridConfig {
    int image_width = 640;
    int image_height = 480;
    int gx = 20; // grid cells along image x
    int gy = 15; // grid cells along image y
    int bins_per_axis = 5;
    double e_int_z = 0.05;
    double e_int_x = 0.05;
    double alpha = 1.0;
    double p_min = 0.7;      // winning-pattern share below which a cell subdivides
    int n_min = 8;           // minimum keypoints for any statistics
    int max_quad_depth = 2;
    double k_sigma = 3.0;    // sigmas above the false-binomial mean
    double static_margin = 1.5; // dynamic support must exceed this multiple of the static count

    void validate() const;
};

/// Axis-aligned pixel rectangle, half-open on the max edges.
struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
    bool contains(double u, double v) const {
        return u >= x0 && u < x1 && v >= y0 && v < y1;
    }
    double mid_x() const { return 0.5 * (x0 + x1); }
    double mid_y() const { return 0.5 * (y0 + y1); }
};

/// Cell geometry of one assignment pass. Shifted passes move the grid lines
/// by half a cell; the half-width boundary cells this creates are truncated
/// at the image edges, so every in-bounds pixel belongs to exactly one cell.
struct PassGrid {
    int pass_id = 0; // 0 unshifted, 1 x-shift, 2 y-shift, 3 both
    bool shift_x = false;
    bool shift_y = false;
    int gx = 0, gy = 0;
    double cell_w = 0.0, cell_h = 0.0;
    double image_w = 0.0, image_h = 0.0;
    int cols = 0, rows = 0;

    int col_of(double u) const;
    int row_of(double v) const;
    int cell_index(double u, double v) const { return row_of(v) * cols + col_of(u); }
    Rect cell_rect(int col, int row) const;
    int n_cells() const { return cols * rows; }
};

PassGrid make_pass_grid(const GridConfig& cfg, int pass_id);

/// Per-cell histogram over motion bins; each slot holds the correspondence
/// ids counted into that bin.
struct CellHistogram {
    std::vector<std::vector<int>> slots;
};

struct RejectedMatch {
    enum class Reason : std::uint8_t { OutOfBounds, DegeneratePoint };
    int id = 0;
    Reason reason = Reason::OutOfBounds;
};

/// The motion-statistics tensor: one bin histogram per grid cell.
struct GridTensor {
    PassGrid grid;
    int bins_per_axis = 0;
    std::vector<CellHistogram> cells;
    long total_assigned = 0;

    int max_bin() const { return (bins_per_axis - 1) / 2; }
    int slot_of(const MotionBin& b) const {
        const int B = max_bin();
        return (b.iz + B) * bins_per_axis + (b.ix + B);
    }
    MotionBin bin_of_slot(int slot) const {
        const int B = max_bin();
        return {slot / bins_per_axis - B, slot % bins_per_axis - B};
    }
    int count(int cell_id, const MotionBin& b) const {
        return static_cast<int>(cells[cell_id].slots[slot_of(b)].size());
    }
};

struct AssignResult {
    GridTensor tensor;
    std::vector<RejectedMatch> rejected;
};

/// Quantizes every correspondence's residual under pose0 and pushes it into
/// the cell containing its matched-frame pixel. Out-of-bounds pixels and
/// degenerate points are reported per record, never dropped silently.
AssignResult assign(std::span<const Correspondence> matches, const SE3& pose0,
                    const GridConfig& cfg, const PassGrid& grid);
AssignResult assign(std::span<const Correspondence> matches, const SE3& pose0,
                    const GridConfig& cfg);

/// Largest and second-largest histogram entries of one cell.
/// Ties are broken deterministically: the static bin (0,0) wins any tie it
/// participates in; between tied dynamic bins the lexicographically greater
/// (iz, ix) pair wins.
struct CellStats {
    int cell_id = 0;
    int n = 0;
    MotionBin max1_bin;
    int max1_count = 0;
    MotionBin max2_bin;
    int max2_count = 0;
    int static_count = 0; // count of the (0,0) bin
};

CellStats cell_stats(const GridTensor& tensor, int cell_id);

/// Ranking used for s_max1/s_max2 selection (see CellStats).
bool bin_entry_better(const MotionBin& a, int count_a, const MotionBin& b, int count_b);

enum class Verdict : std::uint8_t { Static, Dynamic, Unknown };

struct Provenance {
    int pass_id = 0;
    int cell_id = 0;
    std::string quad_path; // quadrant digits from the cell root, "" for the whole cell
};

struct CellDecision {
    int cell_id = 0;
    Verdict verdict = Verdict::Unknown;
    MotionBin bin;        // winning pattern (meaningful verdict for Dynamic)
    int support = 0;      // count of the winning pattern
    int n = 0;            // keypoints in this leaf
    int static_count = 0;
    Provenance provenance;
    std::vector<int> members;         // every correspondence id in the leaf
    std::vector<int> winning_members; // ids counted in the winning pattern
};

/// Unknown when n < n_min; Dynamic when a non-static pattern wins, its
/// support exceeds the binomial threshold tau(n) and clears static_margin
/// times the cell's static count; Static otherwise.
CellDecision classify_cell(const CellStats& stats, const StatModel& model,
                           const GridConfig& cfg);

struct QuadNode {
    Rect rect;
    int depth = 0;
    std::vector<int> member_ids;
    std::vector<QuadNode> children; // empty or exactly 4
};

/// Recursive quadtree refinement of one cell. A node splits into 4 equal
/// quads when its winning pattern holds less than p_min of the points, it
/// has more than n_min points, and depth allows; children decisions replace
/// the parent's. Fills node.children for inspection and returns the leaf
/// decisions.
std::vector<CellDecision> subdivide(QuadNode& node,
                                    std::span<const Correspondence> matches,
                                    const SE3& pose0, const GridConfig& cfg,
                                    const StatModel& model, int pass_id = 0);

struct PassResult {
    PassGrid grid;
    std::vector<CellDecision> decisions;
    std::vector<RejectedMatch> rejected;
};

/// Runs the four half-cell-shifted assignment passes (unshifted, x, y, both),
/// each with quadtree refinement, and returns per-pass leaf decisions.
std::vector<PassResult> run_passes(std::span<const Correspondence> matches,
                                   const SE3& pose0, const GridConfig& cfg,
                                   const StatModel& model);

} // namespace gmc
