#include "satsynth/dataset_io.hpp"

#include "json_util.hpp"
#include "satsynth/error.hpp"
#include "satsynth/pose_sampling.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace satsynth {

using detail::Json;

// ---------------------------------------------------------------------------
// OBJ

namespace {

struct Corner {
  std::int64_t v = 0;
  std::int64_t n = -1;  // -1: no normal
};

std::int64_t resolve_index(long long raw, std::size_t count, int line) {
  if (raw > 0) return raw - 1;
  if (raw < 0) return static_cast<std::int64_t>(count) + raw;
  throw Error(ErrorCode::kParse, "obj line " + std::to_string(line) + ": index 0 is not valid");
}

Corner parse_corner(const std::string& token, std::size_t vcount, std::size_t ncount, int line) {
  Corner c;
  std::string parts[3];
  int field = 0;
  for (char ch : token) {
    if (ch == '/') {
      if (++field > 2) break;
    } else {
      parts[field] += ch;
    }
  }
  try {
    c.v = resolve_index(std::stoll(parts[0]), vcount, line);
    if (field == 2 && !parts[2].empty()) c.n = resolve_index(std::stoll(parts[2]), ncount, line);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kParse, "obj line " + std::to_string(line) + ": bad face entry '" +
                                       token + "'");
  }
  return c;
}

Vec3 parse_xyz(std::istringstream& in, int line) {
  double x, y, z;
  if (!(in >> x >> y >> z)) {
    throw Error(ErrorCode::kParse, "obj line " + std::to_string(line) + ": expected 3 numbers");
  }
  return {x, y, z};
}

}  // namespace

RawMesh parse_obj(const std::string& text) {
  std::vector<Vec3> positions, normals;
  std::vector<std::array<Corner, 3>> faces;
  std::vector<std::uint32_t> face_group;
  std::vector<std::string> groups{"default"};
  std::map<std::string, std::uint32_t> group_index{{"default", 0}};
  std::uint32_t current = 0;

  std::istringstream lines(text);
  std::string raw;
  int line = 0;
  while (std::getline(lines, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream in(raw);
    std::string tag;
    if (!(in >> tag)) continue;
    if (tag == "v") {
      positions.push_back(parse_xyz(in, line));
    } else if (tag == "vn") {
      normals.push_back(parse_xyz(in, line));
    } else if (tag == "f") {
      std::vector<Corner> poly;
      std::string tok;
      while (in >> tok) poly.push_back(parse_corner(tok, positions.size(), normals.size(), line));
      if (poly.size() < 3) {
        throw Error(ErrorCode::kParse, "obj line " + std::to_string(line) + ": face needs 3 vertices");
      }
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        faces.push_back({poly[0], poly[i], poly[i + 1]});
        face_group.push_back(current);
      }
    } else if (tag == "g" || tag == "o" || tag == "usemtl") {
      std::string name;
      in >> name;
      if (name.empty()) name = "default";
      auto [it, inserted] = group_index.emplace(name, static_cast<std::uint32_t>(groups.size()));
      if (inserted) groups.push_back(name);
      current = it->second;
    }
  }

  RawMesh mesh;
  mesh.material_names = groups;
  mesh.face_material = face_group;
  bool all_normals = !normals.empty();
  for (const auto& f : faces) {
    for (const Corner& c : f) all_normals = all_normals && c.n >= 0;
  }
  if (!all_normals) {
    mesh.vertices = positions;
    for (const auto& f : faces) mesh.triangles.push_back({f[0].v, f[1].v, f[2].v});
    return mesh;
  }
  // A vertex per distinct (position, normal) pair so hard edges keep their normals.
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> ids;
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    std::array<std::int64_t, 3> tri{};
    for (int k = 0; k < 3; ++k) {
      const Corner& c = faces[fi][k];
      if (c.v < 0 || c.v >= static_cast<std::int64_t>(positions.size())) {
        std::ostringstream msg;
        msg << "triangle " << fi << ": vertex index " << c.v << " out of range (vertex count "
            << positions.size() << ")";
        throw Error(ErrorCode::kParse, msg.str());
      }
      if (c.n >= static_cast<std::int64_t>(normals.size())) {
        std::ostringstream msg;
        msg << "triangle " << fi << ": normal index " << c.n << " out of range (normal count "
            << normals.size() << ")";
        throw Error(ErrorCode::kParse, msg.str());
      }
      auto [it, inserted] = ids.emplace(std::make_pair(c.v, c.n),
                                        static_cast<std::int64_t>(mesh.vertices.size()));
      if (inserted) {
        mesh.vertices.push_back(positions[c.v]);
        mesh.normals.push_back(normals[c.n]);
      }
      tri[k] = it->second;
    }
    mesh.triangles.push_back(tri);
  }
  return mesh;
}

Mesh load_obj(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorCode::kIo, "mesh not found: " + path.string());
  }
  try {
    return validate_mesh(parse_obj(detail::read_text_file(path)));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) {
      throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
    }
    throw;
  }
}

std::string format_mesh_json(const Mesh& mesh) {
  Json positions = Json::array(), normals = Json::array(), triangles = Json::array();
  for (const Vec3& v : mesh.vertices()) positions.push_back(detail::vec3_to_json(v));
  for (const Vec3& n : mesh.normals()) normals.push_back(detail::vec3_to_json(n));
  for (const Triangle& t : mesh.triangles()) triangles.push_back(Json::array({t[0], t[1], t[2]}));
  return detail::dump(Json{{"positions", positions}, {"normals", normals}, {"triangles", triangles}});
}

// ---------------------------------------------------------------------------
// Keypoints

KeypointSet parse_keypoints(const std::string& text) {
  const Json doc = detail::parse_json(text, "keypoint file");
  detail::reject_unknown_keys(doc, {"origin", "keypoints"}, "keypoint file", ErrorCode::kParse);
  if (!doc.contains("keypoints") || !doc["keypoints"].is_array()) {
    throw Error(ErrorCode::kParse, "keypoint file: missing keypoints array");
  }
  const Vec3 origin =
      doc.contains("origin") ? detail::vec3_from_json(doc["origin"], "keypoint file origin")
                             : Vec3::Zero();
  std::vector<Keypoint> kps;
  std::set<std::string> names;
  for (std::size_t i = 0; i < doc["keypoints"].size(); ++i) {
    const Json& rec = doc["keypoints"][i];
    const std::string context = "keypoint " + std::to_string(i);
    detail::reject_unknown_keys(rec, {"id", "name", "position"}, context, ErrorCode::kParse);
    if (!rec.contains("id") || !rec["id"].is_number_integer() || !rec.contains("position")) {
      throw Error(ErrorCode::kParse, context + ": needs integer id and position");
    }
    Keypoint kp;
    kp.id = rec["id"].get<int>();
    if (rec.contains("name")) {
      if (!rec["name"].is_string()) throw Error(ErrorCode::kParse, context + ": name must be a string");
      kp.name = rec["name"].get<std::string>();
      if (!kp.name.empty() && !names.insert(kp.name).second) {
        throw Error(ErrorCode::kParse, context + ": duplicate name " + kp.name);
      }
    }
    kp.position = detail::vec3_from_json(rec["position"], context);
    kps.push_back(std::move(kp));
  }
  try {
    return KeypointSet(origin, std::move(kps));
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, std::string("keypoint file: ") + e.what());
  }
}

KeypointSet load_keypoints(const std::filesystem::path& path) {
  return parse_keypoints(detail::read_text_file(path));
}

std::string format_keypoints(const KeypointSet& set) {
  Json kps = Json::array();
  for (const Keypoint& kp : set.keypoints()) {
    kps.push_back(Json{{"id", kp.id}, {"name", kp.name}, {"position", detail::vec3_to_json(kp.position)}});
  }
  return detail::dump(Json{{"origin", detail::vec3_to_json(set.origin())}, {"keypoints", kps}});
}

// ---------------------------------------------------------------------------
// Labels and rasters

std::string format_labels(const std::string& frame, const Pose& pose, const GroundTruthBundle& gt) {
  Json kps = Json::array();
  for (const Keypoint2D& kp : gt.keypoints2d) {
    Json rec{{"id", kp.id}, {"visible", kp.visible}};
    rec["u"] = std::isfinite(kp.u) ? Json(kp.u) : Json(nullptr);
    rec["v"] = std::isfinite(kp.v) ? Json(kp.v) : Json(nullptr);
    kps.push_back(std::move(rec));
  }
  Json doc{{"frame", frame}, {"pose", detail::pose_to_json(pose)}, {"keypoints", kps}};
  doc["bbox"] = gt.bbox ? Json::array({gt.bbox->umin, gt.bbox->vmin, gt.bbox->umax, gt.bbox->vmax})
                        : Json(nullptr);
  return detail::dump(doc);
}

namespace {

FrameLabels labels_from_json(const Json& doc) {
  detail::reject_unknown_keys(doc, {"frame", "pose", "keypoints", "bbox"}, "label file",
                              ErrorCode::kParse);
  if (!doc.contains("frame") || !doc["frame"].is_string() || !doc.contains("pose") ||
      !doc.contains("keypoints") || !doc["keypoints"].is_array()) {
    throw Error(ErrorCode::kParse, "label file: needs frame, pose and keypoints");
  }
  FrameLabels out;
  out.frame = doc["frame"].get<std::string>();
  out.pose = detail::pose_from_json(doc["pose"], "label file pose", kPoseFileNormTolerance);
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  for (const Json& rec : doc["keypoints"]) {
    detail::reject_unknown_keys(rec, {"id", "u", "v", "visible"}, "label keypoint",
                                ErrorCode::kParse);
    Keypoint2D kp;
    kp.id = rec.at("id").get<int>();
    kp.u = rec.at("u").is_null() ? kNaN : rec.at("u").get<double>();
    kp.v = rec.at("v").is_null() ? kNaN : rec.at("v").get<double>();
    kp.visible = rec.at("visible").get<bool>();
    out.keypoints2d.push_back(kp);
  }
  if (doc.contains("bbox") && !doc["bbox"].is_null()) {
    const Json& b = doc["bbox"];
    if (!b.is_array() || b.size() != 4) throw Error(ErrorCode::kParse, "label file: bad bbox");
    out.bbox = BoundingBox{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
  }
  return out;
}

}  // namespace

FrameLabels parse_labels(const std::string& text) {
  const Json doc = detail::parse_json(text, "label file");
  try {
    return labels_from_json(doc);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("label file: ") + e.what());
  }
}

FloatImage depth_image(const GroundTruthBundle& gt) {
  FloatImage img(gt.width, gt.height, 1);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<float>(gt.depth[i]);
  return img;
}

FloatImage dense_image(const GroundTruthBundle& gt) {
  FloatImage img(gt.width, gt.height, 3);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    img.data[i] = static_cast<float>(gt.dense_coords[i]);
  }
  return img;
}

ByteImage segmentation_image(const GroundTruthBundle& gt) {
  ByteImage img(gt.width, gt.height, 1);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = gt.segmentation[i] ? 255 : 0;
  return img;
}

}  // namespace satsynth
