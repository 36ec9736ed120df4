#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "wbmpc/kinematics/kinematic_tree.hpp"

namespace wbmpc {

/// Parses a model description file. Field names are documented in the README;
/// unknown fields are rejected with a field-level error message.
KinematicTree loadModel(const std::string& path);

KinematicTree parseModel(const nlohmann::json& j);

}  // namespace wbmpc
