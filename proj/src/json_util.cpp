#include "json_util.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace satsynth::detail {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, source + ": " + e.what());
  }
}

namespace {

double finite_number(const Json& j, const std::string& context) {
  if (!j.is_number()) throw Error(ErrorCode::kParse, context + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorCode::kParse, context + ": non-finite value");
  return x;
}

}  // namespace

Vec3 vec3_from_json(const Json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::kParse, context + ": expected an array of 3 numbers");
  }
  return {finite_number(j[0], context), finite_number(j[1], context),
          finite_number(j[2], context)};
}

Json vec3_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json pose_to_json(const Pose& pose) {
  const auto q = pose.rotation.xyzw();
  return Json{{"q", Json::array({q[0], q[1], q[2], q[3]})}, {"v", vec3_to_json(pose.translation)}};
}

Pose pose_from_json(const Json& record, const std::string& context, double tolerance) {
  if (!record.is_object() || !record.contains("q") || !record.contains("v")) {
    throw Error(ErrorCode::kParse, context + ": expected an object with q and v");
  }
  const Json& q = record["q"];
  if (!q.is_array() || q.size() != 4) {
    throw Error(ErrorCode::kParse, context + ": q must be an array [x, y, z, w]");
  }
  const double x = finite_number(q[0], context), y = finite_number(q[1], context);
  const double z = finite_number(q[2], context), w = finite_number(q[3], context);
  Pose pose;
  try {
    pose.rotation = Quaternion::from_components(x, y, z, w, tolerance);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, context + ": " + e.what());
  }
  pose.translation = vec3_from_json(record["v"], context);
  return pose;
}

Json camera_to_json(const CameraModel& camera) {
  const Distortion& d = camera.distortion();
  return Json{{"width", camera.width()},
              {"height", camera.height()},
              {"fx", camera.fx()},
              {"fy", camera.fy()},
              {"cx", camera.cx()},
              {"cy", camera.cy()},
              {"distortion", Json{{"k1", d.k1}, {"k2", d.k2}, {"k3", d.k3}, {"p1", d.p1}, {"p2", d.p2}}}};
}

CameraModel camera_from_json(const Json& j, const std::string& section, ErrorCode code) {
  reject_unknown_keys(j, {"width", "height", "fx", "fy", "cx", "cy", "distortion"}, section, code);
  auto number = [&](const Json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw Error(code, section + "." + key + ": expected a number");
    return obj[key].get<double>();
  };
  auto integer = [&](const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) throw Error(code, section + "." + key + ": expected an integer");
    return j[key].get<int>();
  };
  const int width = integer("width", 512), height = integer("height", 512);
  Distortion d;
  if (j.contains("distortion")) {
    const Json& dj = j["distortion"];
    reject_unknown_keys(dj, {"k1", "k2", "k3", "p1", "p2"}, section + ".distortion", code);
    d.k1 = number(dj, "k1", 0.0);
    d.k2 = number(dj, "k2", 0.0);
    d.k3 = number(dj, "k3", 0.0);
    d.p1 = number(dj, "p1", 0.0);
    d.p2 = number(dj, "p2", 0.0);
  }
  try {
    return CameraModel(width, height, number(j, "fx", 768.0), number(j, "fy", 768.0),
                       number(j, "cx", width / 2.0), number(j, "cy", height / 2.0), d);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNonConvergent) throw;
    throw Error(code, section + ": " + e.what());
  }
}

void reject_unknown_keys(const Json& object, std::initializer_list<std::string_view> allowed,
                         const std::string& section, ErrorCode code) {
  if (!object.is_object()) throw Error(code, section + ": expected an object");
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) throw Error(code, section + ": unknown key \"" + key + "\"");
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace satsynth::detail
