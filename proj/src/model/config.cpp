#include "gdpnet/errors.hpp"
#include "gdpnet/model.hpp"

namespace gdpnet::model {

void ModelConfig::validate() const {
  const auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (input_width == 0) fail("input_width must be positive");
  if (node_width == 0) fail("node_width must be positive");
  if (gaussian_width == 0) fail("gaussian_width must be positive");
  if (views == 0) fail("views must be at least 1");
  if (sublayers == 0) fail("sublayers must be at least 1");
  if (node_width % sublayers != 0) {
    fail("node_width " + std::to_string(node_width) + " is not divisible by sublayers " +
         std::to_string(sublayers));
  }
  if (!(ratio > 0.0 && ratio <= 1.0)) fail("ratio must lie in (0, 1]");
  if (!(gamma > 0.0)) fail("gamma must be positive");
  if (!(dtw_weight >= 0.0)) fail("dtw_weight must be non-negative");
  if (classes < 2) fail("classes must be at least 2");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (batch_size == 0) fail("batch_size must be positive");
  if (epochs == 0) fail("epochs must be positive");
}

ModelConfig dialogre_profile() {
  ModelConfig c;
  c.views = 3;
  c.stages = 3;
  c.node_width = 300;
  c.dropout = 0.5;
  c.ratio = 0.7;
  c.dtw_weight = 1e-6;
  c.learning_rate = 3e-5;
  c.batch_size = 24;
  c.epochs = 20;
  return c;
}

ModelConfig tacred_profile() {
  ModelConfig c = dialogre_profile();
  c.ratio = 0.8;
  c.dtw_weight = 2e-4;
  c.learning_rate = 2e-5;
  c.batch_size = 32;
  c.epochs = 10;
  return c;
}

}  // namespace gdpnet::model
