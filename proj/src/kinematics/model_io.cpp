#include "wbmpc/kinematics/model_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "wbmpc/rotations.hpp"

namespace wbmpc {

using nlohmann::json;

namespace {

void rejectUnknownFields(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw std::invalid_argument("model: unknown field '" + item.key() + "' in " + where);
    }
  }
}

vector3_t readVec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument("model: " + where + " must be an array of 3 numbers");
  }
  return vector3_t(j[0].get<scalar_t>(), j[1].get<scalar_t>(), j[2].get<scalar_t>());
}

matrix3_t readInertia(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 6) {
    throw std::invalid_argument("model: " + where + " must be [ixx, iyy, izz, ixy, ixz, iyz]");
  }
  matrix3_t I;
  I << j[0].get<scalar_t>(), j[3].get<scalar_t>(), j[4].get<scalar_t>(),  //
      j[3].get<scalar_t>(), j[1].get<scalar_t>(), j[5].get<scalar_t>(),   //
      j[4].get<scalar_t>(), j[5].get<scalar_t>(), j[2].get<scalar_t>();
  return I;
}

}  // namespace

KinematicTree parseModel(const json& j) {
  rejectUnknownFields(j, {"name", "links", "contacts", "arm_links", "joint_limits", "pitch_guard"}, "model root");
  if (!j.contains("links") || !j.contains("contacts") || !j.contains("arm_links")) {
    throw std::invalid_argument("model: required fields are 'links', 'contacts', 'arm_links'");
  }

  std::vector<Link> links;
  std::map<std::string, int> nameToIndex;
  for (const auto& lj : j.at("links")) {
    rejectUnknownFields(lj, {"name", "parent", "joint_axis", "placement", "mass", "com", "inertia"},
                        "link");
    Link link;
    link.name = lj.at("name").get<std::string>();
    link.mass = lj.at("mass").get<scalar_t>();
    link.comOffset = readVec3(lj.at("com"), "links/" + link.name + "/com");
    link.inertia = readInertia(lj.at("inertia"), "links/" + link.name + "/inertia");

    const bool isBase = links.empty();
    if (isBase) {
      if (lj.contains("parent") && !lj.at("parent").is_null()) {
        throw std::invalid_argument("model: first link is the floating base and takes no parent");
      }
      link.parent = -1;
      link.joint = JointType::FloatingBase;
    } else {
      const auto parentName = lj.at("parent").get<std::string>();
      const auto it = nameToIndex.find(parentName);
      if (it == nameToIndex.end()) {
        throw std::invalid_argument("model: link '" + link.name + "' references unknown parent '" +
                                    parentName + "'");
      }
      link.parent = it->second;
      link.joint = JointType::Revolute;
      link.axis = readVec3(lj.at("joint_axis"), "links/" + link.name + "/joint_axis").normalized();
      const auto& pj = lj.at("placement");
      rejectUnknownFields(pj, {"xyz", "rpy"}, "links/" + link.name + "/placement");
      link.placementPos = readVec3(pj.at("xyz"), "placement/xyz");
      link.placementRot = pj.contains("rpy")
                              ? rotationFromEulerZyx(readVec3(pj.at("rpy"), "placement/rpy"))
                              : matrix3_t::Identity();
    }
    nameToIndex[link.name] = static_cast<int>(links.size());
    links.push_back(std::move(link));
  }

  std::vector<ContactPoint> contacts;
  for (const auto& cj : j.at("contacts")) {
    rejectUnknownFields(cj, {"name", "link", "offset", "class"}, "contact");
    ContactPoint cp;
    cp.name = cj.at("name").get<std::string>();
    const auto linkName = cj.at("link").get<std::string>();
    const auto it = nameToIndex.find(linkName);
    if (it == nameToIndex.end()) {
      throw std::invalid_argument("model: contact '" + cp.name + "' references unknown link '" +
                                  linkName + "'");
    }
    cp.link = it->second;
    cp.offset = readVec3(cj.at("offset"), "contacts/" + cp.name + "/offset");
    const auto cls = cj.at("class").get<std::string>();
    if (cls == "foot") {
      cp.type = ContactClass::Foot;
    } else if (cls == "hand") {
      cp.type = ContactClass::Hand;
    } else {
      throw std::invalid_argument("model: contact class must be 'foot' or 'hand', got '" + cls + "'");
    }
    contacts.push_back(std::move(cp));
  }

  std::vector<int> armLinks;
  for (const auto& name : j.at("arm_links")) {
    const auto it = nameToIndex.find(name.get<std::string>());
    if (it == nameToIndex.end()) {
      throw std::invalid_argument("model: arm_links references unknown link '" +
                                  name.get<std::string>() + "'");
    }
    armLinks.push_back(it->second);
  }

  std::vector<JointLimit> limits(links.size() - 1);
  if (j.contains("joint_limits")) {
    const auto readLimit = [](const json& lj, const std::string& key) {
      rejectUnknownFields(lj, {"v_max", "tau_max"}, "joint_limits/" + key);
      JointLimit lim;
      lim.velocityMax = lj.at("v_max").get<scalar_t>();
      lim.torqueMax = lj.at("tau_max").get<scalar_t>();
      return lim;
    };
    // The default entry applies first so per-joint entries can override it.
    if (j.at("joint_limits").contains("default")) {
      const JointLimit lim = readLimit(j.at("joint_limits").at("default"), "default");
      for (auto& l : limits) {
        l = lim;
      }
    }
    for (const auto& item : j.at("joint_limits").items()) {
      if (item.key() == "default") {
        continue;
      }
      const auto it = nameToIndex.find(item.key());
      if (it == nameToIndex.end() || it->second == 0) {
        throw std::invalid_argument("model: joint_limits references unknown joint '" + item.key() + "'");
      }
      limits[KinematicTree::jointOfLink(it->second)] = readLimit(item.value(), item.key());
    }
  }

  KinematicTree tree(std::move(links), std::move(contacts), std::move(armLinks), std::move(limits));
  if (j.contains("pitch_guard")) {
    tree.setPitchGuard(j.at("pitch_guard").get<scalar_t>());
  }
  return tree;
}

KinematicTree loadModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("model: cannot open '" + path + "'");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("model: JSON parse error in '" + path + "': " + e.what());
  }
  return parseModel(j);
}

}  // namespace wbmpc
