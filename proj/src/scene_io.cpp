#include "etaik/scene_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "etaik/errors.hpp"

namespace etaik {

using nlohmann::json;

namespace {

constexpr int kSceneVersion = 1;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw FormatError(where + ": unknown key '" + key + "'");
  }
}

const json& at(const json& j, const std::string& key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(where + ": missing key '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw FormatError(where + ": expected a number");
  return j.get<double>();
}

Vec3 vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw FormatError(where + ": expected an array of 3 numbers");
  return Vec3(number(j[0], where), number(j[1], where), number(j[2], where));
}

Quat quat(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) throw FormatError(where + ": expected [w, x, y, z]");
  Quat q(number(j[0], where), number(j[1], where), number(j[2], where), number(j[3], where));
  if (q.norm() < 1e-9) throw FormatError(where + ": zero quaternion");
  // Already-unit input is kept as is so that write-after-read is exact.
  return std::abs(q.norm() - 1.0) > 1e-14 ? q.normalized() : q;
}

Pose pose(const json& j, const std::string& where) {
  check_keys(j, {"position", "quaternion"}, where);
  Pose p;
  if (j.contains("position")) p.position = vec3(j["position"], where + ".position");
  if (j.contains("quaternion")) p.orientation = quat(j["quaternion"], where + ".quaternion");
  return p;
}

Sphere sphere(const json& j, const std::string& where) {
  check_keys(j, {"center", "radius"}, where);
  return Sphere{vec3(at(j, "center", where), where + ".center"), number(at(j, "radius", where), where + ".radius")};
}

std::pair<ChainModel, Pose> chain(const json& j, const std::string& where) {
  check_keys(j, {"name", "base", "joints", "tcp", "link_spheres"}, where);
  const std::string name = j.value("name", where);
  const Pose base = j.contains("base") ? pose(j["base"], where + ".base") : Pose::identity();
  const Pose tcp = j.contains("tcp") ? pose(j["tcp"], where + ".tcp") : Pose::identity();

  std::vector<RevoluteJoint> joints;
  const json& js = at(j, "joints", where);
  if (!js.is_array()) throw FormatError(where + ".joints: expected an array");
  for (std::size_t i = 0; i < js.size(); ++i) {
    const std::string w = where + ".joints[" + std::to_string(i) + "]";
    const json& jj = js[i];
    check_keys(jj, {"type", "axis", "origin_position", "origin_quaternion", "q_min", "q_max", "vel_max", "acc_max"}, w);
    const std::string type = jj.value("type", "revolute");
    if (type != "revolute") throw FormatError(w + ": only revolute joints are supported (got '" + type + "')");
    RevoluteJoint joint;
    joint.axis = vec3(at(jj, "axis", w), w + ".axis");
    if (jj.contains("origin_position")) joint.origin.position = vec3(jj["origin_position"], w + ".origin_position");
    if (jj.contains("origin_quaternion")) joint.origin.orientation = quat(jj["origin_quaternion"], w + ".origin_quaternion");
    joint.limits.q_min = number(at(jj, "q_min", w), w + ".q_min");
    joint.limits.q_max = number(at(jj, "q_max", w), w + ".q_max");
    joint.limits.vel_max = number(at(jj, "vel_max", w), w + ".vel_max");
    joint.limits.acc_max = number(at(jj, "acc_max", w), w + ".acc_max");
    joints.push_back(joint);
  }

  std::vector<std::vector<Sphere>> links(joints.size() + 1);
  if (j.contains("link_spheres")) {
    const json& ls = j["link_spheres"];
    if (!ls.is_array() || ls.size() != joints.size() + 1) {
      throw FormatError(where + ".link_spheres: expected dof + 1 lists");
    }
    for (std::size_t l = 0; l < ls.size(); ++l) {
      const std::string w = where + ".link_spheres[" + std::to_string(l) + "]";
      if (!ls[l].is_array()) throw FormatError(w + ": expected an array");
      for (const auto& s : ls[l]) links[l].push_back(sphere(s, w));
    }
  }
  try {
    return {ChainModel(name, std::move(joints), tcp, std::move(links)), base};
  } catch (const ContractViolation& e) {
    throw FormatError(e.what());
  }
}

LinkId link_id(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_number_integer()) {
    throw FormatError(where + ": expected [\"a\"|\"b\", link_index]");
  }
  const std::string arm = j[0].get<std::string>();
  if (arm != "a" && arm != "b") throw FormatError(where + ": arm must be \"a\" or \"b\"");
  return LinkId{arm == "a" ? Arm::A : Arm::B, j[1].get<int>()};
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json to_json(const Quat& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }
json to_json(const Pose& p) { return {{"position", to_json(p.position)}, {"quaternion", to_json(p.orientation)}}; }

json chain_to_json(const ChainModel& c, const Pose& base) {
  json joints = json::array();
  for (const auto& j : c.joints()) {
    joints.push_back({{"type", "revolute"},
                      {"axis", to_json(j.axis)},
                      {"origin_position", to_json(j.origin.position)},
                      {"origin_quaternion", to_json(j.origin.orientation)},
                      {"q_min", j.limits.q_min},
                      {"q_max", j.limits.q_max},
                      {"vel_max", j.limits.vel_max},
                      {"acc_max", j.limits.acc_max}});
  }
  json links = json::array();
  for (const auto& l : c.link_spheres()) {
    json list = json::array();
    for (const auto& s : l) list.push_back({{"center", to_json(s.center)}, {"radius", s.radius}});
    links.push_back(list);
  }
  return {{"name", c.name()}, {"base", to_json(base)}, {"joints", joints}, {"tcp", to_json(c.tcp_offset())},
          {"link_spheres", links}};
}

}  // namespace

CollisionWorld parse_scene(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("scene: ") + e.what());
  }
  check_keys(doc, {"format", "version", "robot_a", "robot_b", "scene"}, "scene");
  if (doc.value("format", std::string()) != "etaik-scene") throw FormatError("scene: format must be \"etaik-scene\"");
  if (doc.value("version", -1) != kSceneVersion) {
    throw FormatError("scene: unsupported version (expected " + std::to_string(kSceneVersion) + ")");
  }
  auto [a, base_a] = chain(at(doc, "robot_a", "scene"), "robot_a");
  auto [b, base_b] = chain(at(doc, "robot_b", "scene"), "robot_b");

  std::vector<Sphere> obstacles;
  std::vector<std::pair<LinkId, LinkId>> exclusions;
  double motion_step = kDefaultMotionStep;
  if (doc.contains("scene")) {
    const json& s = doc["scene"];
    check_keys(s, {"obstacles", "exclusions", "motion_step"}, "scene.scene");
    if (s.contains("obstacles")) {
      for (const auto& o : s["obstacles"]) obstacles.push_back(sphere(o, "scene.obstacles"));
    }
    if (s.contains("exclusions")) {
      for (const auto& e : s["exclusions"]) {
        if (!e.is_array() || e.size() != 2) throw FormatError("scene.exclusions: expected pairs");
        exclusions.push_back({link_id(e[0], "scene.exclusions"), link_id(e[1], "scene.exclusions")});
      }
    }
    if (s.contains("motion_step")) motion_step = number(s["motion_step"], "scene.motion_step");
  }
  try {
    return CollisionWorld(DualArmSystem(std::move(a), std::move(b), base_a, base_b), std::move(obstacles),
                          std::move(exclusions), motion_step);
  } catch (const ContractViolation& e) {
    throw FormatError(e.what());
  }
}

CollisionWorld load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open scene file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

std::string scene_to_string(const CollisionWorld& world) {
  const auto& sys = world.system();
  json obstacles = json::array();
  for (const auto& o : world.obstacles()) obstacles.push_back({{"center", to_json(o.center)}, {"radius", o.radius}});
  json exclusions = json::array();
  for (const auto& [x, y] : world.exclusions()) {
    if (x.arm == y.arm && std::abs(x.link - y.link) == 1) continue;
    exclusions.push_back(json::array({json::array({x.arm == Arm::A ? "a" : "b", x.link}),
                                      json::array({y.arm == Arm::A ? "a" : "b", y.link})}));
  }
  json doc = {{"format", "etaik-scene"},
              {"version", kSceneVersion},
              {"robot_a", chain_to_json(sys.robot_a(), sys.base_a())},
              {"robot_b", chain_to_json(sys.robot_b(), sys.base_b())},
              {"scene", {{"obstacles", obstacles}, {"exclusions", exclusions}, {"motion_step", world.motion_step()}}}};
  return doc.dump(2);
}

}  // namespace etaik
