#include "gridmotion/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace gmc {

namespace io_detail {

std::vector<std::pair<int, std::string>> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open file: " + path.string());
    std::vector<std::pair<int, std::string>> lines;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        lines.emplace_back(line_no, line);
    }
    return lines;
}

void check_format_version(const std::vector<std::pair<int, std::string>>& lines,
                          const std::string& file) {
    constexpr std::string_view marker = "# gridmotion-format";
    for (const auto& [line_no, text] : lines) {
        if (text.rfind(marker, 0) != 0) continue;
        std::string version = text.substr(marker.size());
        const auto b = version.find_first_not_of(" \t");
        version = b == std::string::npos ? std::string{} : version.substr(b);
        if (version != "v1")
            throw ParseError(file, line_no,
                             "unsupported format version '" + version + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

double parse_double(const std::string& s, const std::string& file, int line) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ParseError(file, line, "not a number: '" + s + "'");
    if (!std::isfinite(v))
        throw ParseError(file, line, "non-finite number: '" + s + "'");
    return v;
}

long parse_long(const std::string& s, const std::string& file, int line) {
    long v = 0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ParseError(file, line, "not an integer: '" + s + "'");
    return v;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace io_detail

using io_detail::check_format_version;
using io_detail::format_double;
using io_detail::parse_double;
using io_detail::parse_long;
using io_detail::read_lines;
using io_detail::split;
using io_detail::split_ws;

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot open file for writing: " + tmp.string());
        out << text;
        if (!out)
            throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace {

constexpr const char* kMatchesHeader =
    "id,u_re,v_re,u_ma,v_ma,xre_x,xre_y,xre_z,xma_x,xma_y,xma_z";
constexpr const char* kLabelsHeader = "id,label,cluster_id,bin_z,bin_x";

// key = value parser shared by the config-style formats. Keys keep file
// order; duplicates are rejected.
std::vector<std::pair<std::string, std::string>> read_key_values(
    const std::filesystem::path& path, std::vector<int>* line_numbers) {
    const auto lines = read_lines(path);
    io_detail::check_format_version(lines, path.string());
    std::vector<std::pair<std::string, std::string>> kvs;
    std::map<std::string, int> seen;
    for (const auto& [line_no, text] : lines) {
        if (text[0] == '#') continue;
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ParseError(path.string(), line_no, "expected 'key = value'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty())
            throw ParseError(path.string(), line_no, "empty key");
        if (!seen.emplace(key, line_no).second)
            throw ParseError(path.string(), line_no, "duplicate key '" + key + "'");
        kvs.emplace_back(key, value);
        if (line_numbers) line_numbers->push_back(line_no);
    }
    return kvs;
}

SE3 parse_pose_tuple(const std::string& value, const std::string& file, int line) {
    const auto fields = split_ws(value);
    if (fields.size() != 7)
        throw ParseError(file, line, "pose needs 7 fields (tx ty tz qx qy qz qw)");
    double v[7];
    for (int k = 0; k < 7; ++k) v[k] = parse_double(fields[k], file, line);
    const Eigen::Quaterniond q(v[6], v[3], v[4], v[5]);
    if (q.norm() == 0.0)
        throw ParseError(file, line, "zero quaternion");
    return SE3::from_quaternion(q, {v[0], v[1], v[2]});
}

std::string format_pose_tuple(const SE3& pose) {
    const auto q = pose.quaternion();
    std::string out;
    bool first = true;
    for (double v : {pose.translation.x(), pose.translation.y(), pose.translation.z(),
                     q.x(), q.y(), q.z(), q.w()}) {
        if (!first) out += ' ';
        out += format_double(v);
        first = false;
    }
    return out;
}

std::string format_id_list(std::span<const int> ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(ids[i]);
    }
    return out;
}

std::vector<int> parse_id_list(const std::string& value, const std::string& file,
                               int line) {
    std::vector<int> out;
    for (const auto& tok : split_ws(value))
        out.push_back(static_cast<int>(parse_long(tok, file, line)));
    return out;
}

} // namespace

std::vector<Correspondence> read_matches(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    check_format_version(lines, path.string());
    std::vector<Correspondence> matches;
    bool header_seen = false;
    std::map<int, int> ids_seen;
    for (const auto& [line_no, text] : lines) {
        if (text[0] == '#') continue;
        if (!header_seen) {
            if (text != kMatchesHeader)
                throw ParseError(path.string(), line_no,
                                 std::string("expected header '") + kMatchesHeader + "'");
            header_seen = true;
            continue;
        }
        const auto fields = split(text, ',');
        if (fields.size() != 11)
            throw ParseError(path.string(), line_no,
                             "expected 11 fields, got " + std::to_string(fields.size()));
        Correspondence c;
        c.id = static_cast<int>(parse_long(fields[0], path.string(), line_no));
        double v[10];
        for (int k = 0; k < 10; ++k)
            v[k] = parse_double(fields[k + 1], path.string(), line_no);
        c.px_re = {v[0], v[1]};
        c.px_ma = {v[2], v[3]};
        c.x_re = {v[4], v[5], v[6]};
        c.x_ma = {v[7], v[8], v[9]};
        if (c.x_re.z() <= 0.0 || c.x_ma.z() <= 0.0)
            throw ParseError(path.string(), line_no, "point depth must be positive");
        if (!ids_seen.emplace(c.id, line_no).second)
            throw ParseError(path.string(), line_no,
                             "duplicate id " + std::to_string(c.id));
        matches.push_back(c);
    }
    if (!header_seen)
        throw ParseError(path.string(), 1, "missing matches header");
    return matches;
}

void write_matches(const std::filesystem::path& path,
                   std::span<const Correspondence> matches) {
    std::string out{kFormatHeader};
    out += '\n';
    out += kMatchesHeader;
    out += '\n';
    for (const auto& c : matches) {
        out += std::to_string(c.id);
        for (double v : {c.px_re.x(), c.px_re.y(), c.px_ma.x(), c.px_ma.y(),
                         c.x_re.x(), c.x_re.y(), c.x_re.z(), c.x_ma.x(), c.x_ma.y(),
                         c.x_ma.z()}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    atomic_write_text(path, out);
}

LabelMap read_labels(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    check_format_version(lines, path.string());
    LabelMap lm;
    bool header_seen = false;
    for (const auto& [line_no, text] : lines) {
        if (text[0] == '#') continue;
        if (!header_seen) {
            if (text != kLabelsHeader)
                throw ParseError(path.string(), line_no,
                                 std::string("expected header '") + kLabelsHeader + "'");
            header_seen = true;
            continue;
        }
        const auto fields = split(text, ',');
        if (fields.size() != 5)
            throw ParseError(path.string(), line_no,
                             "expected 5 fields, got " + std::to_string(fields.size()));
        const int id = static_cast<int>(parse_long(fields[0], path.string(), line_no));
        LabelEntry e;
        if (fields[1] == "S") e.label = Label::Static;
        else if (fields[1] == "D") e.label = Label::Dynamic;
        else if (fields[1] == "U") e.label = Label::Unknown;
        else
            throw ParseError(path.string(), line_no,
                             "label must be S, D or U, got '" + fields[1] + "'");
        if (e.label == Label::Dynamic) {
            e.cluster_id =
                static_cast<int>(parse_long(fields[2], path.string(), line_no));
            e.bin.iz = static_cast<int>(parse_long(fields[3], path.string(), line_no));
            e.bin.ix = static_cast<int>(parse_long(fields[4], path.string(), line_no));
        } else if (!fields[2].empty() || !fields[3].empty() || !fields[4].empty()) {
            throw ParseError(path.string(), line_no,
                             "cluster and bin fields must be empty for S/U rows");
        }
        if (!lm.entries.emplace(id, e).second)
            throw ParseError(path.string(), line_no,
                             "duplicate id " + std::to_string(id));
        lm.ids.push_back(id);
    }
    if (!header_seen)
        throw ParseError(path.string(), 1, "missing labels header");
    return lm;
}

void write_labels(const std::filesystem::path& path, const LabelMap& labels) {
    std::string out{kFormatHeader};
    out += '\n';
    out += kLabelsHeader;
    out += '\n';
    for (int id : labels.ids) {
        const LabelEntry& e = labels.at(id);
        out += std::to_string(id);
        switch (e.label) {
            case Label::Static: out += ",S,,,"; break;
            case Label::Unknown: out += ",U,,,"; break;
            case Label::Dynamic:
                out += ",D,";
                out += std::to_string(e.cluster_id);
                out += ',';
                out += std::to_string(e.bin.iz);
                out += ',';
                out += std::to_string(e.bin.ix);
                break;
        }
        out += '\n';
    }
    atomic_write_text(path, out);
}

PipelineConfig read_pipeline_config(const std::filesystem::path& path) {
    std::vector<int> line_numbers;
    const auto kvs = read_key_values(path, &line_numbers);
    PipelineConfig cfg;
    const std::string file = path.string();
    for (std::size_t i = 0; i < kvs.size(); ++i) {
        const auto& [key, value] = kvs[i];
        const int line = line_numbers[i];
        const auto as_int = [&] { return static_cast<int>(parse_long(value, file, line)); };
        const auto as_double = [&] { return parse_double(value, file, line); };
        if (key == "image_width") cfg.grid.image_width = as_int();
        else if (key == "image_height") cfg.grid.image_height = as_int();
        else if (key == "gx") cfg.grid.gx = as_int();
        else if (key == "gy") cfg.grid.gy = as_int();
        else if (key == "bins_per_axis") cfg.grid.bins_per_axis = as_int();
        else if (key == "e_int_z") cfg.grid.e_int_z = as_double();
        else if (key == "e_int_x") cfg.grid.e_int_x = as_double();
        else if (key == "alpha") cfg.grid.alpha = as_double();
        else if (key == "p_min") cfg.grid.p_min = as_double();
        else if (key == "n_min") cfg.grid.n_min = as_int();
        else if (key == "max_quad_depth") cfg.grid.max_quad_depth = as_int();
        else if (key == "k_sigma") cfg.grid.k_sigma = as_double();
        else if (key == "static_margin") cfg.grid.static_margin = as_double();
        else if (key == "stat_t") cfg.stat.t = as_double();
        else if (key == "stat_beta") cfg.stat.beta = as_double();
        else if (key == "stat_m_over_m") {
            if (value == "auto") {
                cfg.stat_m_auto = true;
            } else {
                cfg.stat_m_auto = false;
                cfg.stat.m_over_M = as_double();
            }
        } else if (key == "ransac_iterations") cfg.ransac.iterations = as_int();
        else if (key == "ransac_inlier_threshold") cfg.ransac.inlier_threshold = as_double();
        else if (key == "ransac_seed") cfg.ransac.seed = static_cast<std::uint64_t>(parse_long(value, file, line));
        else if (key == "min_cluster_features") cfg.min_cluster_features = as_int();
        else
            throw ParseError(file, line, "unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

void write_pipeline_config(const std::filesystem::path& path,
                           const PipelineConfig& cfg) {
    std::string out{kFormatHeader};
    out += "\n# filter configuration\n";
    const auto kv = [&out](const std::string& key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    kv("image_width", std::to_string(cfg.grid.image_width));
    kv("image_height", std::to_string(cfg.grid.image_height));
    kv("gx", std::to_string(cfg.grid.gx));
    kv("gy", std::to_string(cfg.grid.gy));
    kv("bins_per_axis", std::to_string(cfg.grid.bins_per_axis));
    kv("e_int_z", format_double(cfg.grid.e_int_z));
    kv("e_int_x", format_double(cfg.grid.e_int_x));
    kv("alpha", format_double(cfg.grid.alpha));
    kv("p_min", format_double(cfg.grid.p_min));
    kv("n_min", std::to_string(cfg.grid.n_min));
    kv("max_quad_depth", std::to_string(cfg.grid.max_quad_depth));
    kv("k_sigma", format_double(cfg.grid.k_sigma));
    kv("static_margin", format_double(cfg.grid.static_margin));
    kv("stat_t", format_double(cfg.stat.t));
    kv("stat_beta", format_double(cfg.stat.beta));
    kv("stat_m_over_m", cfg.stat_m_auto ? "auto" : format_double(cfg.stat.m_over_M));
    kv("ransac_iterations", std::to_string(cfg.ransac.iterations));
    kv("ransac_inlier_threshold", format_double(cfg.ransac.inlier_threshold));
    kv("ransac_seed", std::to_string(cfg.ransac.seed));
    kv("min_cluster_features", std::to_string(cfg.min_cluster_features));
    atomic_write_text(path, out);
}

SceneConfig read_scene_config(const std::filesystem::path& path) {
    std::vector<int> line_numbers;
    const auto kvs = read_key_values(path, &line_numbers);
    SceneConfig cfg;
    cfg.objects.clear();
    const std::string file = path.string();

    std::map<int, ObjectConfig> objects;
    for (std::size_t i = 0; i < kvs.size(); ++i) {
        const auto& [key, value] = kvs[i];
        const int line = line_numbers[i];
        const auto as_int = [&] { return static_cast<int>(parse_long(value, file, line)); };
        const auto as_double = [&] { return parse_double(value, file, line); };
        if (key == "width") cfg.intrinsics.width = as_int();
        else if (key == "height") cfg.intrinsics.height = as_int();
        else if (key == "fx") cfg.intrinsics.fx = as_double();
        else if (key == "fy") cfg.intrinsics.fy = as_double();
        else if (key == "cx") cfg.intrinsics.cx = as_double();
        else if (key == "cy") cfg.intrinsics.cy = as_double();
        else if (key == "n_static") cfg.n_static = as_int();
        else if (key == "z_min") cfg.z_min = as_double();
        else if (key == "z_max") cfg.z_max = as_double();
        else if (key == "camera_motion") cfg.camera_motion = parse_pose_tuple(value, file, line);
        else if (key == "pixel_noise_sigma") cfg.pixel_noise_sigma = as_double();
        else if (key == "depth_noise_sigma") cfg.depth_noise_sigma = as_double();
        else if (key == "false_match_rate") cfg.false_match_rate = as_double();
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(value, file, line));
        else if (key.starts_with("object.")) {
            const auto parts = split(key, '.');
            if (parts.size() != 3)
                throw ParseError(file, line, "object keys look like object.N.field");
            const int idx = static_cast<int>(parse_long(parts[1], file, line));
            if (idx < 0)
                throw ParseError(file, line, "object index must be >= 0");
            ObjectConfig& obj = objects[idx];
            const std::string& field = parts[2];
            if (field == "n_points") obj.n_points = as_int();
            else if (field == "center") {
                const auto f = split_ws(value);
                if (f.size() != 3)
                    throw ParseError(file, line, "center needs 3 fields");
                for (int k = 0; k < 3; ++k)
                    obj.center[k] = parse_double(f[k], file, line);
            } else if (field == "extent") obj.extent = as_double();
            else if (field == "motion") obj.motion = parse_pose_tuple(value, file, line);
            else
                throw ParseError(file, line, "unknown object field '" + field + "'");
        } else
            throw ParseError(file, line, "unknown key '" + key + "'");
    }

    int expected = 0;
    for (const auto& [idx, obj] : objects) {
        if (idx != expected)
            throw ParseError(file, 1, "object indices must be contiguous from 0");
        cfg.objects.push_back(obj);
        ++expected;
    }
    cfg.validate();
    return cfg;
}

void write_scene_config(const std::filesystem::path& path, const SceneConfig& cfg) {
    std::string out{kFormatHeader};
    out += "\n# synthetic scene\n";
    const auto kv = [&out](const std::string& key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    kv("width", std::to_string(cfg.intrinsics.width));
    kv("height", std::to_string(cfg.intrinsics.height));
    kv("fx", format_double(cfg.intrinsics.fx));
    kv("fy", format_double(cfg.intrinsics.fy));
    kv("cx", format_double(cfg.intrinsics.cx));
    kv("cy", format_double(cfg.intrinsics.cy));
    kv("n_static", std::to_string(cfg.n_static));
    kv("z_min", format_double(cfg.z_min));
    kv("z_max", format_double(cfg.z_max));
    kv("camera_motion", format_pose_tuple(cfg.camera_motion));
    kv("pixel_noise_sigma", format_double(cfg.pixel_noise_sigma));
    kv("depth_noise_sigma", format_double(cfg.depth_noise_sigma));
    kv("false_match_rate", format_double(cfg.false_match_rate));
    kv("seed", std::to_string(cfg.seed));
    for (std::size_t i = 0; i < cfg.objects.size(); ++i) {
        const auto& obj = cfg.objects[i];
        const std::string prefix = "object." + std::to_string(i) + ".";
        kv(prefix + "n_points", std::to_string(obj.n_points));
        kv(prefix + "center", format_double(obj.center.x()) + " " +
                                  format_double(obj.center.y()) + " " +
                                  format_double(obj.center.z()));
        kv(prefix + "extent", format_double(obj.extent));
        kv(prefix + "motion", format_pose_tuple(obj.motion));
    }
    atomic_write_text(path, out);
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
    std::vector<int> line_numbers;
    const auto kvs = read_key_values(path, &line_numbers);
    GroundTruth gt;
    const std::string file = path.string();
    std::map<int, std::vector<int>> members;
    bool pose_seen = false;
    for (std::size_t i = 0; i < kvs.size(); ++i) {
        const auto& [key, value] = kvs[i];
        const int line = line_numbers[i];
        if (key == "pose") {
            gt.pose = parse_pose_tuple(value, file, line);
            pose_seen = true;
        } else if (key == "dynamic_ids") gt.dynamic_ids = parse_id_list(value, file, line);
        else if (key == "false_match_ids") gt.false_match_ids = parse_id_list(value, file, line);
        else if (key.starts_with("object.")) {
            const auto parts = split(key, '.');
            if (parts.size() != 3 || parts[2] != "members")
                throw ParseError(file, line, "object keys look like object.N.members");
            const int idx = static_cast<int>(parse_long(parts[1], file, line));
            members[idx] = parse_id_list(value, file, line);
        } else
            throw ParseError(file, line, "unknown key '" + key + "'");
    }
    if (!pose_seen)
        throw ParseError(file, 1, "missing 'pose' entry");
    int expected = 0;
    for (auto& [idx, ids] : members) {
        if (idx != expected)
            throw ParseError(file, 1, "object indices must be contiguous from 0");
        gt.object_members.push_back(std::move(ids));
        ++expected;
    }
    return gt;
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt) {
    std::string out{kFormatHeader};
    out += "\n# scene ground truth\n";
    out += "pose = " + format_pose_tuple(gt.pose) + '\n';
    out += "dynamic_ids = " + format_id_list(gt.dynamic_ids) + '\n';
    out += "false_match_ids = " + format_id_list(gt.false_match_ids) + '\n';
    for (std::size_t i = 0; i < gt.object_members.size(); ++i) {
        out += "object." + std::to_string(i) +
               ".members = " + format_id_list(gt.object_members[i]) + '\n';
    }
    atomic_write_text(path, out);
}

SE3 read_pose(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    check_format_version(lines, path.string());
    for (const auto& [line_no, text] : lines) {
        if (text[0] == '#') continue;
        return parse_pose_tuple(text, path.string(), line_no);
    }
    throw ParseError(path.string(), 1, "no pose line found");
}

void write_pose(const std::filesystem::path& path, const SE3& pose) {
    std::string out{kFormatHeader};
    out += "\n# pose: tx ty tz qx qy qz qw\n";
    out += format_pose_tuple(pose);
    out += '\n';
    atomic_write_text(path, out);
}

void write_report(const std::filesystem::path& path, const FilterReport& report) {
    std::string out{kFormatHeader};
    out += "\n# filter report\n";
    const auto kv = [&out](const std::string& key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    kv("matches", std::to_string(report.n_matches));
    kv("static", std::to_string(report.n_static));
    kv("dynamic", std::to_string(report.n_dynamic));
    kv("unknown", std::to_string(report.n_unknown));
    kv("rejected", std::to_string(report.n_rejected));
    kv("pose_estimated", report.pose_estimated ? "1" : "0");
    kv("clusters", std::to_string(report.clusters.size()));
    for (const auto& c : report.clusters) {
        const std::string prefix = "cluster." + std::to_string(c.id) + ".";
        kv(prefix + "pass", std::to_string(c.pass_id));
        kv(prefix + "local_id", std::to_string(c.local_id));
        kv(prefix + "bin", std::to_string(c.bin.iz) + " " + std::to_string(c.bin.ix));
        kv(prefix + "cells", std::to_string(c.n_cells));
        kv(prefix + "members", std::to_string(c.n_members));
        kv(prefix + "support", std::to_string(c.support));
        kv(prefix + "labeled", std::to_string(c.n_labeled));
    }
    for (const auto& p : report.passes) {
        const std::string prefix = "pass." + std::to_string(p.pass_id) + ".";
        kv(prefix + "cells", std::to_string(p.n_cells));
        kv(prefix + "leaves", std::to_string(p.n_leaves));
        kv(prefix + "static", std::to_string(p.n_static));
        kv(prefix + "dynamic", std::to_string(p.n_dynamic));
        kv(prefix + "unknown", std::to_string(p.n_unknown));
        kv(prefix + "fused", std::to_string(p.n_fused));
    }
    atomic_write_text(path, out);
}

} // namespace gmc
