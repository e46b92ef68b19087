#pragma once

#include <string>
#include <vector>

#include "cfpc/dataset.hpp"
#include "cfpc/metrics.hpp"
#include "cfpc/mlp.hpp"
#include "cfpc/normalizer.hpp"
#include "cfpc/types.hpp"

namespace cfpc {

struct TrainConfig {
  double lr = 1e-3;
  double lr_decay = 0.1;
  std::vector<int> decay_epochs = {30, 45}; // decay applies after these epochs
  int max_epochs = 50;
  int batch_size = 256;
  double l2 = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 1;

  void validate() const;
};

// Trained network plus the normalizers it was fitted with. Feature vectors
// are median/IQR-scaled by default; models whose inputs are themselves power
// vectors (the unfolded stages) reuse the dB min-max map on the input side so
// that stage inputs and outputs share one coordinate system.
struct MlModel {
  MlpParams params;
  bool db_inputs = false;
  InputNormalizer in_norm; // used when !db_inputs
  OutputNormalizer in_db;  // used when db_inputs
  OutputNormalizer out_norm;

  RVec normalize_inputs(const RVec& features) const {
    return db_inputs ? in_db.apply(features) : in_norm.apply(features);
  }
};

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  MlModel best;        // lowest-validation-loss checkpoint
  MlModel final_state; // parameters after the last epoch
  std::vector<EpochStats> curve;
  int best_epoch = 0; // 1-based
};

// Mini-batch Adam on MAE with l2 weight decay; 80/10/10 contiguous split;
// normalizers fitted on the training rows only. Throws std::runtime_error
// if the loss turns non-finite. `db_inputs` selects the dB min-max input
// map for power-valued features; `warm` starts from the given parameters
// instead of a fresh random initialization.
TrainResult train_e2e(const Dataset& ds, const MlpSpec& spec, const TrainConfig& tcfg,
                      bool db_inputs = false, const MlpParams* warm = nullptr);

struct UnfoldedTrainResult {
  std::vector<MlModel> stages;             // best checkpoints
  std::vector<TrainResult> stage_results;
  RVec stage_test_mae;                     // normalized-space MAE per stage
};

// Sequential stage training: stage 1 consumes the dataset features, each
// later stage consumes the previous stage's predictions and starts from its
// trained weights; every stage is supervised by the dataset labels.
UnfoldedTrainResult train_unfolded(const Dataset& ds, const TrainConfig& tcfg, int n_stages);

// Normalize, forward, denormalize: nonnegative power vector in watts.
RVec predict_raw(const MlModel& model, const RVec& features);
RVec predict_unfolded_raw(const std::vector<MlModel>& stages, const RVec& features);

// Inference with feasibility projection: per-AP scale-down to the power
// budget, then a global scale-down to the exposure cap (DL); per-UE clamp to
// the transmit cap (UL).
PowerAllocationDL predict_dl(const MlModel& model, const RVec& features,
                             const EffectiveGains& gains, const SystemConfig& cfg);
PowerAllocationDL project_dl(const RVec& powers, const EffectiveGains& gains,
                             const SystemConfig& cfg);
PowerAllocationUL predict_ul(const MlModel& model, const RVec& features, const SystemConfig& cfg);

// Model file round trip (JSON document; provenance is embedded verbatim).
void save_model(const std::string& path, const MlModel& model,
                const std::string& provenance_json = "{}");
MlModel load_model(const std::string& path);

} // namespace cfpc
