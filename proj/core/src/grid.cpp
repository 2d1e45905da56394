#include "gridmotion/grid.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace gmc {

void GridConfig::validate() const {
    if (image_width <= 0 || image_height <= 0)
        throw Error("GridConfig: image dimensions must be positive");
    if (gx < 1 || gy < 1)
        throw Error("GridConfig: gx and gy must be >= 1");
    if (bins_per_axis < 3 || bins_per_axis % 2 == 0)
        throw Error("GridConfig: bins_per_axis must be odd and >= 3");
    if (e_int_z <= 0.0 || e_int_x <= 0.0)
        throw Error("GridConfig: residual intervals must be positive");
    if (alpha <= 0.0)
        throw Error("GridConfig: alpha must be positive");
    if (!(p_min > 0.0 && p_min <= 1.0))
        throw Error("GridConfig: p_min must lie in (0, 1]");
    if (n_min < 1)
        throw Error("GridConfig: n_min must be >= 1");
    if (max_quad_depth < 0)
        throw Error("GridConfig: max_quad_depth must be >= 0");
    if (k_sigma < 0.0)
        throw Error("GridConfig: k_sigma must be >= 0");
    if (static_margin < 0.0)
        throw Error("GridConfig: static_margin must be >= 0");
}

int PassGrid::col_of(double u) const {
    const double s = shift_x ? u + 0.5 * cell_w : u;
    const int c = static_cast<int>(std::floor(s / cell_w));
    return std::clamp(c, 0, cols - 1);
}

int PassGrid::row_of(double v) const {
    const double s = shift_y ? v + 0.5 * cell_h : v;
    const int r = static_cast<int>(std::floor(s / cell_h));
    return std::clamp(r, 0, rows - 1);
}

Rect PassGrid::cell_rect(int col, int row) const {
    const double x0 = shift_x ? (col - 0.5) * cell_w : col * cell_w;
    const double y0 = shift_y ? (row - 0.5) * cell_h : row * cell_h;
    Rect r;
    r.x0 = std::max(0.0, x0);
    r.y0 = std::max(0.0, y0);
    r.x1 = std::min(image_w, x0 + cell_w);
    r.y1 = std::min(image_h, y0 + cell_h);
    return r;
}

PassGrid make_pass_grid(const GridConfig& cfg, int pass_id) {
    if (pass_id < 0 || pass_id > 3)
        throw Error("make_pass_grid: pass_id must be in [0, 3]");
    PassGrid g;
    g.pass_id = pass_id;
    g.shift_x = pass_id == 1 || pass_id == 3;
    g.shift_y = pass_id == 2 || pass_id == 3;
    g.gx = cfg.gx;
    g.gy = cfg.gy;
    g.image_w = cfg.image_width;
    g.image_h = cfg.image_height;
    g.cell_w = g.image_w / cfg.gx;
    g.cell_h = g.image_h / cfg.gy;
    g.cols = cfg.gx + (g.shift_x ? 1 : 0);
    g.rows = cfg.gy + (g.shift_y ? 1 : 0);
    return g;
}

AssignResult assign(std::span<const Correspondence> matches, const SE3& pose0,
                    const GridConfig& cfg, const PassGrid& grid) {
    cfg.validate();
    AssignResult out;
    out.tensor.grid = grid;
    out.tensor.bins_per_axis = cfg.bins_per_axis;
    out.tensor.cells.resize(grid.n_cells());
    const int n_slots = cfg.bins_per_axis * cfg.bins_per_axis;
    for (auto& cell : out.tensor.cells)
        cell.slots.resize(n_slots);

    for (const auto& c : matches) {
        const double u = c.px_ma.x();
        const double v = c.px_ma.y();
        if (!(u >= 0.0 && u < grid.image_w && v >= 0.0 && v < grid.image_h)) {
            out.rejected.push_back({c.id, RejectedMatch::Reason::OutOfBounds});
            continue;
        }
        if (c.x_ma.norm() == 0.0) {
            out.rejected.push_back({c.id, RejectedMatch::Reason::DegeneratePoint});
            continue;
        }
        const Residual r = residual(c, pose0, cfg.alpha);
        const MotionBin bin = quantize(r, cfg.e_int_z, cfg.e_int_x, cfg.bins_per_axis);
        const int cell = grid.cell_index(u, v);
        out.tensor.cells[cell].slots[out.tensor.slot_of(bin)].push_back(c.id);
        ++out.tensor.total_assigned;
    }
    return out;
}

AssignResult assign(std::span<const Correspondence> matches, const SE3& pose0,
                    const GridConfig& cfg) {
    return assign(matches, pose0, cfg, make_pass_grid(cfg, 0));
}

bool bin_entry_better(const MotionBin& a, int count_a, const MotionBin& b, int count_b) {
    if (count_a != count_b) return count_a > count_b;
    if (a.is_static() != b.is_static()) return a.is_static();
    return b < a; // lexicographically greater (iz, ix) wins among dynamic ties
}

namespace {

// counts is a dense bins x bins histogram in slot order.
CellStats stats_from_counts(int cell_id, const std::vector<int>& counts,
                            int bins_per_axis) {
    const int B = (bins_per_axis - 1) / 2;
    CellStats s;
    s.cell_id = cell_id;
    bool have1 = false, have2 = false;
    for (int slot = 0; slot < static_cast<int>(counts.size()); ++slot) {
        const int count = counts[slot];
        s.n += count;
        if (count == 0) continue;
        const MotionBin bin{slot / bins_per_axis - B, slot % bins_per_axis - B};
        if (bin.is_static()) s.static_count = count;
        if (!have1 || bin_entry_better(bin, count, s.max1_bin, s.max1_count)) {
            if (have1) {
                s.max2_bin = s.max1_bin;
                s.max2_count = s.max1_count;
                have2 = true;
            }
            s.max1_bin = bin;
            s.max1_count = count;
            have1 = true;
        } else if (!have2 || bin_entry_better(bin, count, s.max2_bin, s.max2_count)) {
            s.max2_bin = bin;
            s.max2_count = count;
            have2 = true;
        }
    }
    return s;
}

} // namespace

CellStats cell_stats(const GridTensor& tensor, int cell_id) {
    if (cell_id < 0 || cell_id >= static_cast<int>(tensor.cells.size()))
        throw Error("cell_stats: cell_id out of range");
    const auto& cell = tensor.cells[cell_id];
    std::vector<int> counts(cell.slots.size(), 0);
    for (int slot = 0; slot < static_cast<int>(cell.slots.size()); ++slot)
        counts[slot] = static_cast<int>(cell.slots[slot].size());
    return stats_from_counts(cell_id, counts, tensor.bins_per_axis);
}

CellDecision classify_cell(const CellStats& stats, const StatModel& model,
                           const GridConfig& cfg) {
    CellDecision d;
    d.cell_id = stats.cell_id;
    d.bin = stats.max1_bin;
    d.support = stats.max1_count;
    d.n = stats.n;
    d.static_count = stats.static_count;
    d.provenance.cell_id = stats.cell_id;

    if (stats.n < cfg.n_min) {
        d.verdict = Verdict::Unknown;
        return d;
    }
    if (stats.max1_bin.is_static()) {
        d.verdict = Verdict::Static;
        return d;
    }
    const double tau = support_threshold(model, stats.n, cfg.k_sigma);
    const bool above_noise = stats.max1_count > tau;
    const bool beats_static =
        stats.max1_count >= cfg.static_margin * stats.static_count;
    d.verdict = (above_noise && beats_static) ? Verdict::Dynamic : Verdict::Static;
    return d;
}

namespace {

struct Entry {
    int id;
    double u, v;
    MotionBin bin;
};

CellStats stats_from_entries(int cell_id, const std::vector<Entry>& entries,
                             int bins_per_axis) {
    const int B = (bins_per_axis - 1) / 2;
    std::vector<int> counts(bins_per_axis * bins_per_axis, 0);
    for (const auto& e : entries)
        ++counts[(e.bin.iz + B) * bins_per_axis + (e.bin.ix + B)];
    return stats_from_counts(cell_id, counts, bins_per_axis);
}

void subdivide_entries(QuadNode& node, int cell_id, std::vector<Entry> entries,
                       const std::string& path, int pass_id, const GridConfig& cfg,
                       const StatModel& model, std::vector<CellDecision>& out) {
    const CellStats stats = stats_from_entries(cell_id, entries, cfg.bins_per_axis);
    const bool ambiguous = stats.max1_count < cfg.p_min * stats.n;
    const bool enough_points = stats.n > cfg.n_min;
    const bool depth_left = node.depth < cfg.max_quad_depth;

    if (!(ambiguous && enough_points && depth_left)) {
        CellDecision d = classify_cell(stats, model, cfg);
        d.provenance.pass_id = pass_id;
        d.provenance.quad_path = path;
        d.members.reserve(entries.size());
        for (const auto& e : entries) {
            d.members.push_back(e.id);
            if (e.bin == stats.max1_bin) d.winning_members.push_back(e.id);
        }
        out.push_back(std::move(d));
        return;
    }

    const double mx = node.rect.mid_x();
    const double my = node.rect.mid_y();
    node.children.resize(4);
    std::vector<std::vector<Entry>> parts(4);
    for (auto& e : entries) {
        const int quad = (e.u >= mx ? 1 : 0) + (e.v >= my ? 2 : 0);
        parts[quad].push_back(e);
    }
    entries.clear();
    for (int q = 0; q < 4; ++q) {
        QuadNode& child = node.children[q];
        child.depth = node.depth + 1;
        child.rect.x0 = (q & 1) ? mx : node.rect.x0;
        child.rect.x1 = (q & 1) ? node.rect.x1 : mx;
        child.rect.y0 = (q & 2) ? my : node.rect.y0;
        child.rect.y1 = (q & 2) ? node.rect.y1 : my;
        child.member_ids.reserve(parts[q].size());
        for (const auto& e : parts[q]) child.member_ids.push_back(e.id);
        subdivide_entries(child, cell_id, std::move(parts[q]),
                          path + static_cast<char>('0' + q), pass_id, cfg, model, out);
    }
}

} // namespace

std::vector<CellDecision> subdivide(QuadNode& node,
                                    std::span<const Correspondence> matches,
                                    const SE3& pose0, const GridConfig& cfg,
                                    const StatModel& model, int pass_id) {
    cfg.validate();
    model.validate();
    std::unordered_map<int, const Correspondence*> by_id;
    by_id.reserve(matches.size());
    for (const auto& m : matches) by_id.emplace(m.id, &m);

    std::vector<Entry> entries;
    entries.reserve(node.member_ids.size());
    for (int id : node.member_ids) {
        const auto it = by_id.find(id);
        if (it == by_id.end())
            throw Error("subdivide: member id not found in matches");
        const Correspondence& c = *it->second;
        const Residual r = residual(c, pose0, cfg.alpha);
        entries.push_back({id, c.px_ma.x(), c.px_ma.y(),
                           quantize(r, cfg.e_int_z, cfg.e_int_x, cfg.bins_per_axis)});
    }

    std::vector<CellDecision> out;
    subdivide_entries(node, /*cell_id=*/-1, std::move(entries), "", pass_id, cfg, model, out);
    return out;
}

std::vector<PassResult> run_passes(std::span<const Correspondence> matches,
                                   const SE3& pose0, const GridConfig& cfg,
                                   const StatModel& model) {
    cfg.validate();
    model.validate();

    std::unordered_map<int, const Correspondence*> by_id;
    by_id.reserve(matches.size());
    for (const auto& m : matches) by_id.emplace(m.id, &m);

    std::vector<PassResult> results;
    results.reserve(4);
    for (int pass = 0; pass < 4; ++pass) {
        AssignResult ar = assign(matches, pose0, cfg, make_pass_grid(cfg, pass));
        PassResult pr;
        pr.grid = ar.tensor.grid;
        pr.rejected = std::move(ar.rejected);

        for (int cell = 0; cell < pr.grid.n_cells(); ++cell) {
            const auto& hist = ar.tensor.cells[cell];
            std::vector<Entry> entries;
            for (int slot = 0; slot < static_cast<int>(hist.slots.size()); ++slot) {
                const MotionBin bin = ar.tensor.bin_of_slot(slot);
                for (int id : hist.slots[slot]) {
                    const Correspondence& c = *by_id.at(id);
                    entries.push_back({id, c.px_ma.x(), c.px_ma.y(), bin});
                }
            }
            QuadNode root;
            root.rect = pr.grid.cell_rect(cell % pr.grid.cols, cell / pr.grid.cols);
            root.depth = 0;
            for (const auto& e : entries) root.member_ids.push_back(e.id);
            subdivide_entries(root, cell, std::move(entries), "", pass, cfg, model,
                              pr.decisions);
        }
        results.push_back(std::move(pr));
    }
    return results;
}

} // namespace gmc
