#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cfpc/rng.hpp"
#include "cfpc/types.hpp"

namespace cfpc {

enum class Act { Linear, Relu };

// Fully-connected network shape: layer_sizes includes the input layer;
// activations has one entry per non-input layer. The first hidden layer is
// linear, every other hidden layer and the output use ReLU.
struct MlpSpec {
  std::vector<int> layer_sizes;
  std::vector<Act> activations;

  static MlpSpec dl_e2e(int in_out);     // pyramid 1024..64 between in/out
  static MlpSpec ul_e2e(int in_out);     // pyramid 64..16
  static MlpSpec unfolded_stage(int in_out); // single 128-wide hidden layer

  int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  std::size_t param_count() const;
  void validate() const;
};

// Per-layer dense weights (row-major, out x in) and biases.
struct MlpParams {
  MlpSpec spec;
  std::vector<RVec> weights;
  std::vector<RVec> biases;
};

MlpParams init_params(const MlpSpec& spec, Rng& rng);

// Forward pass; when acts is non-null it receives the post-activation vector
// of every layer (input first), and preacts the pre-activation vectors.
RVec mlp_forward(const MlpParams& params, const RVec& x, std::vector<RVec>* acts = nullptr,
                 std::vector<RVec>* preacts = nullptr);

struct MlpGrads {
  std::vector<RVec> weights;
  std::vector<RVec> biases;
};
MlpGrads zero_grads(const MlpSpec& spec);

// Mean-absolute-error over the batch and output dimension plus
// l2/2 * ||weights||^2; gradients accumulate into `grads` (which must be
// zeroed by the caller). The |.| subgradient at 0 is taken as 0.
double mlp_loss_and_grads(const MlpParams& params, const std::vector<RVec>& xs,
                          const std::vector<RVec>& ys, double l2, MlpGrads& grads);

// Loss only (no gradient work).
double mlp_loss(const MlpParams& params, const std::vector<RVec>& xs, const std::vector<RVec>& ys,
                double l2);

struct AdamState {
  std::vector<RVec> m_w, v_w, m_b, v_b;
  long step = 0;
};
AdamState init_adam(const MlpSpec& spec);

void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state, double lr,
               double beta1, double beta2, double eps);

} // namespace cfpc
