#ifndef PATHTHERM_PRESETS_HPP
#define PATHTHERM_PRESETS_HPP

#include <map>
#include <string>
#include <vector>

#include "paththerm/network.hpp"

namespace paththerm {

using ParameterMap = std::map<std::string, double>;

/// A built-in network together with the run defaults that make it usable
/// out of the box: a starting state and a truncation box that holds
/// essentially all stationary mass.
struct PresetModel {
  ReactionNetwork network;
  State initial_state;
  State box_upper;
  double window = 1.0;
};

/// Built-in models:
///   schlogl       A + 2X <-> 3X, B <-> X; defaults are the canonical set P*
///   scheme1       R reversible channels A_r + (r-1)X <-> B_r + rX
///   xy_pair       X <-> Y and X + Y <-> 2Y (shared jump vectors)
///   driven_cycle  X <-> Y <-> Z <-> X with n molecules, all jumps distinct
///   birth_death   A <-> X
/// Reverse channels are adjacent (0<->1, 2<->3, ...). Unknown names, unknown
/// parameter keys and missing required parameters raise InputError.
PresetModel preset_model(const std::string& name, const ParameterMap& parameters = {});

inline ReactionNetwork preset(const std::string& name, const ParameterMap& parameters = {}) {
  return preset_model(name, parameters).network;
}

std::vector<std::string> preset_names();

/// Canonical Schlögl parameter set P*: monostable, with negligible mass near
/// X = 200.
ParameterMap schlogl_pstar();

}  // namespace paththerm

#endif  // PATHTHERM_PRESETS_HPP
