#ifndef PATHTHERM_TESTS_SUPPORT_HPP
#define PATHTHERM_TESTS_SUPPORT_HPP

#include <algorithm>
#include <memory>
#include <optional>
#include <string>

#include "paththerm/cme.hpp"
#include "paththerm/generator.hpp"
#include "paththerm/presets.hpp"

namespace testing_support {

using namespace paththerm;

struct Model {
  NetworkPtr network;
  StateBoxPtr box;
  std::shared_ptr<const Generator> generator;
  State x0;
  double window = 1.0;
};

inline Model model(const std::string& name, const ParameterMap& params = {}, std::optional<State> upper = {}) {
  auto preset = preset_model(name, params);
  Model m;
  m.network = std::make_shared<const ReactionNetwork>(std::move(preset.network));
  m.x0 = preset.initial_state;
  m.window = preset.window;
  const State bound = upper ? *upper : preset.box_upper;
  for (std::size_t i = 0; i < m.x0.size() && i < bound.size(); ++i) m.x0[i] = std::min(m.x0[i], bound[i]);
  m.box = make_box(*m.network, bound, m.x0);
  m.generator = std::make_shared<const Generator>(build_generator(m.network, m.box));
  return m;
}

inline Model model_from(const ReactionNetwork& network, State upper, State x0) {
  Model m;
  m.network = std::make_shared<const ReactionNetwork>(network);
  m.x0 = std::move(x0);
  m.box = make_box(*m.network, upper, m.x0);
  m.generator = std::make_shared<const Generator>(build_generator(m.network, m.box));
  return m;
}

}  // namespace testing_support

#endif
