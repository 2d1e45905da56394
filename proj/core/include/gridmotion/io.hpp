#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridmotion/pipeline.hpp"

namespace gmc {

/// Every file format starts with this version comment.
inline constexpr std::string_view kFormatHeader = "# gridmotion-format v1";

/// Matches file: CSV with header
/// "id,u_re,v_re,u_ma,v_ma,xre_x,xre_y,xre_z,xma_x,xma_y,xma_z".
/// Doubles are written in shortest round-trip form; write -> read -> write is
/// byte-identical.
std::vector<Correspondence> read_matches(const std::filesystem::path& path);
void write_matches(const std::filesystem::path& path,
                   std::span<const Correspondence> matches);

/// Labels file: CSV "id,label,cluster_id,bin_z,bin_x" with label in {S,D,U};
/// cluster and bin fields are empty for S/U rows.
LabelMap read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const LabelMap& labels);

/// Pipeline configuration, "key = value" lines; unknown keys are rejected.
PipelineConfig read_pipeline_config(const std::filesystem::path& path);
void write_pipeline_config(const std::filesystem::path& path,
                           const PipelineConfig& cfg);

/// Scene configuration, "key = value" lines with indexed object keys
/// (object.0.n_points = 300). Poses are "tx ty tz qx qy qz qw".
SceneConfig read_scene_config(const std::filesystem::path& path);
void write_scene_config(const std::filesystem::path& path, const SceneConfig& cfg);

/// Scene ground truth, "key = value" lines (pose, dynamic_ids,
/// object.N.members, false_match_ids).
GroundTruth read_ground_truth(const std::filesystem::path& path);
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt);

/// Single pose file: one "tx ty tz qx qy qz qw" line.
SE3 read_pose(const std::filesystem::path& path);
void write_pose(const std::filesystem::path& path, const SE3& pose);

/// Deterministic filter report (counts, clusters, pass provenance). Timings
/// are intentionally not serialized.
void write_report(const std::filesystem::path& path, const FilterReport& report);

/// Writes via a temp file in the same directory plus rename.
void atomic_write_text(const std::filesystem::path& path, const std::string& text);

namespace io_detail {

/// Non-empty lines with their 1-based numbers, trailing '\r' stripped.
std::vector<std::pair<int, std::string>> read_lines(const std::filesystem::path& path);

/// Rejects files carrying a format marker other than v1. Files without a
/// marker are accepted as v1.
void check_format_version(const std::vector<std::pair<int, std::string>>& lines,
                          const std::string& file);

std::vector<std::string> split(const std::string& s, char sep);
std::vector<std::string> split_ws(const std::string& s);

double parse_double(const std::string& s, const std::string& file, int line);
long parse_long(const std::string& s, const std::string& file, int line);

/// Shortest decimal form that round-trips the exact double.
std::string format_double(double v);

} // namespace io_detail

} // namespace gmc
