#pragma once

// Internal helpers shared by the structured-text readers and writers.

#include "satsynth/camera.hpp"
#include "satsynth/error.hpp"
#include "satsynth/geometry.hpp"

#include <json.hpp>

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

namespace satsynth::detail {

using Json = nlohmann::json;

std::string read_text_file(const std::filesystem::path& path);

/// Writes to `path.tmp` then renames over `path`.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& text);

Json parse_json(const std::string& text, const std::string& source);

/// Reads a fixed-length numeric array; throws kParse mentioning `context`.
Vec3 vec3_from_json(const Json& j, const std::string& context);
Json vec3_to_json(const Vec3& v);

Json pose_to_json(const Pose& pose);
/// Accepts quaternions within `tolerance` of unit norm.
Pose pose_from_json(const Json& record, const std::string& context, double tolerance);

Json camera_to_json(const CameraModel& camera);
/// Keys: width, height, fx, fy, cx, cy, optional distortion {k1,k2,k3,p1,p2}.
CameraModel camera_from_json(const Json& j, const std::string& section, ErrorCode code);

/// Throws kConfig if `object` has keys outside `allowed`.
void reject_unknown_keys(const Json& object, std::initializer_list<std::string_view> allowed,
                         const std::string& section, ErrorCode code = ErrorCode::kConfig);

/// 2-space indented dump; doubles use shortest round-trip form.
std::string dump(const Json& j);

}  // namespace satsynth::detail
