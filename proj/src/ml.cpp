#include "cfpc/ml.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace cfpc {

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !(lr_decay > 0.0) || max_epochs < 1 || batch_size < 1 || l2 < 0.0 ||
      !(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0) || !(adam_eps > 0.0))
    throw std::invalid_argument("TrainConfig: invalid hyperparameters");
}

namespace {

double epoch_lr(const TrainConfig& tcfg, int epoch) {
  double lr = tcfg.lr;
  for (int boundary : tcfg.decay_epochs)
    if (epoch > boundary) lr *= tcfg.lr_decay;
  return lr;
}

void fisher_yates(std::vector<int>& idx, Rng& rng) {
  for (size_t i = idx.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.uniform() * static_cast<double>(i));
    if (j >= i) j = i - 1;
    std::swap(idx[i - 1], idx[j]);
  }
}

std::vector<RVec> gather(const std::vector<RVec>& rows, const std::vector<int>& idx) {
  std::vector<RVec> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(rows[i]);
  return out;
}

} // namespace

TrainResult train_e2e(const Dataset& ds, const MlpSpec& spec, const TrainConfig& tcfg,
                      bool db_inputs, const MlpParams* warm) {
  tcfg.validate();
  spec.validate();
  if (ds.rows() < 2) throw std::invalid_argument("train_e2e: need at least 2 rows");
  if (ds.in_cols() != spec.layer_sizes.front() || ds.out_cols() != spec.layer_sizes.back())
    throw std::invalid_argument("train_e2e: dataset and network dimensions disagree");

  const SplitIndices split = split_indices(ds.rows());
  if (split.train.empty()) throw std::invalid_argument("train_e2e: empty training split");

  TrainResult result;
  MlModel model;
  model.db_inputs = db_inputs;
  model.out_norm = fit_output_normalizer(gather(ds.Y, split.train));
  if (db_inputs)
    model.in_db = fit_output_normalizer(gather(ds.X, split.train));
  else
    model.in_norm = fit_input_normalizer(gather(ds.X, split.train));

  std::vector<RVec> Xn(ds.rows()), Yn(ds.rows());
  for (int r = 0; r < ds.rows(); ++r) {
    Xn[r] = model.normalize_inputs(ds.X[r]);
    Yn[r] = model.out_norm.apply(ds.Y[r]);
  }

  Rng rng(tcfg.seed);
  if (warm) {
    if (warm->spec.layer_sizes != spec.layer_sizes)
      throw std::invalid_argument("train_e2e: warm-start parameters have a different shape");
    model.params = *warm;
  } else {
    model.params = init_params(spec, rng);
  }
  AdamState adam = init_adam(spec);
  MlpGrads grads = zero_grads(spec);

  const std::vector<RVec> val_x = gather(Xn, split.val);
  const std::vector<RVec> val_y = gather(Yn, split.val);

  std::vector<int> order = split.train;
  // The starting parameters count as an epoch-0 checkpoint so a warm start
  // is never lost to a worse first epoch.
  double best_val = val_x.empty() ? std::numeric_limits<double>::infinity()
                                  : mlp_loss(model.params, val_x, val_y, 0.0);
  result.best = model;
  result.best_epoch = 0;

  for (int epoch = 1; epoch <= tcfg.max_epochs; ++epoch) {
    const double lr = epoch_lr(tcfg, epoch);
    fisher_yates(order, rng);

    double epoch_loss = 0.0;
    size_t seen = 0;
    for (size_t start = 0; start < order.size(); start += tcfg.batch_size) {
      const size_t stop = std::min(order.size(), start + tcfg.batch_size);
      std::vector<RVec> bx, by;
      bx.reserve(stop - start);
      by.reserve(stop - start);
      for (size_t i = start; i < stop; ++i) {
        bx.push_back(Xn[order[i]]);
        by.push_back(Yn[order[i]]);
      }
      for (auto& g : grads.weights) std::fill(g.begin(), g.end(), 0.0);
      for (auto& g : grads.biases) std::fill(g.begin(), g.end(), 0.0);
      const double loss = mlp_loss_and_grads(model.params, bx, by, tcfg.l2, grads);
      adam_step(model.params, grads, adam, lr, tcfg.beta1, tcfg.beta2, tcfg.adam_eps);
      epoch_loss += loss * static_cast<double>(bx.size());
      seen += bx.size();
    }
    epoch_loss /= static_cast<double>(seen);

    const double val_loss =
        val_x.empty() ? epoch_loss : mlp_loss(model.params, val_x, val_y, 0.0);
    if (!std::isfinite(epoch_loss) || !std::isfinite(val_loss))
      throw std::runtime_error("train_e2e: loss diverged at epoch " + std::to_string(epoch) +
                               " (train=" + std::to_string(epoch_loss) +
                               ", val=" + std::to_string(val_loss) + ")");
    result.curve.push_back({epoch_loss, val_loss});
    if (val_loss < best_val) {
      best_val = val_loss;
      result.best.params = model.params;
      result.best_epoch = epoch;
    }
  }
  result.best.db_inputs = model.db_inputs;
  result.best.in_norm = model.in_norm;
  result.best.in_db = model.in_db;
  result.best.out_norm = model.out_norm;
  result.final_state = model;
  return result;
}

UnfoldedTrainResult train_unfolded(const Dataset& ds, const TrainConfig& tcfg, int n_stages) {
  if (n_stages < 1) throw std::invalid_argument("train_unfolded: need at least one stage");
  if (ds.in_cols() != ds.out_cols())
    throw std::invalid_argument("train_unfolded: feature and label widths must match");

  const SplitIndices split = split_indices(ds.rows());
  UnfoldedTrainResult result;

  std::vector<RVec> inputs = ds.X;
  for (int s = 0; s < n_stages; ++s) {
    Dataset stage_ds;
    stage_ds.X = inputs;
    stage_ds.Y = ds.Y;
    TrainConfig stage_cfg = tcfg;
    stage_cfg.seed = Rng::derive(tcfg.seed, static_cast<std::uint64_t>(s));
    const MlpSpec spec = MlpSpec::unfolded_stage(ds.in_cols());
    // Later stages refine in the coordinates the previous stage already maps
    // to, so they start from its weights rather than a fresh initialization.
    const MlpParams* warm = s == 0 ? nullptr : &result.stages.back().params;
    TrainResult tr = train_e2e(stage_ds, spec, stage_cfg, /*db_inputs=*/true, warm);

    double test_mae = 0.0;
    if (!split.test.empty()) {
      std::vector<RVec> tx, ty;
      for (int i : split.test) {
        tx.push_back(tr.best.normalize_inputs(stage_ds.X[i]));
        ty.push_back(tr.best.out_norm.apply(stage_ds.Y[i]));
      }
      test_mae = mlp_loss(tr.best.params, tx, ty, 0.0);
    }
    result.stage_test_mae.push_back(test_mae);

    std::vector<RVec> next(ds.rows());
    for (int r = 0; r < ds.rows(); ++r) next[r] = predict_raw(tr.best, stage_ds.X[r]);
    inputs = std::move(next);

    result.stages.push_back(tr.best);
    result.stage_results.push_back(std::move(tr));
  }
  return result;
}

RVec predict_raw(const MlModel& model, const RVec& features) {
  const RVec scaled = model.normalize_inputs(features);
  const RVec out = mlp_forward(model.params, scaled);
  return model.out_norm.invert(out);
}

RVec predict_unfolded_raw(const std::vector<MlModel>& stages, const RVec& features) {
  RVec x = features;
  for (const auto& stage : stages) x = predict_raw(stage, x);
  return x;
}

PowerAllocationDL project_dl(const RVec& powers, const EffectiveGains& gains,
                             const SystemConfig& cfg) {
  PowerAllocationDL alloc = PowerAllocationDL::zeros(gains.K, gains.M);
  for (int k = 0; k < gains.K; ++k)
    for (int i = 0; i < gains.N; ++i)
      alloc.at(k, gains.cluster[k][i]) =
          std::max(0.0, powers[static_cast<size_t>(k) * gains.N + i]);

  for (int m = 0; m < gains.M; ++m) {
    double sum = 0.0;
    for (int k = 0; k < gains.K; ++k) sum += alloc.at(k, m);
    if (sum > cfg.ap_power_w) {
      const double scale = cfg.ap_power_w / sum;
      for (int k = 0; k < gains.K; ++k) alloc.at(k, m) *= scale;
    }
  }

  if (std::isfinite(cfg.ipd_limit_w_m2)) {
    const RVec exposure = ipd(alloc, gains);
    double ratio = 0.0;
    for (double v : exposure) ratio = std::max(ratio, v / cfg.ipd_limit_w_m2);
    if (ratio > 1.0)
      for (auto& v : alloc.p) v /= ratio;
  }
  return alloc;
}

PowerAllocationDL predict_dl(const MlModel& model, const RVec& features,
                             const EffectiveGains& gains, const SystemConfig& cfg) {
  return project_dl(predict_raw(model, features), gains, cfg);
}

PowerAllocationUL predict_ul(const MlModel& model, const RVec& features, const SystemConfig& cfg) {
  PowerAllocationUL alloc;
  alloc.q = predict_raw(model, features);
  const double cap = cfg.ue_cap_w();
  for (auto& v : alloc.q) v = std::min(std::max(v, 0.0), cap);
  return alloc;
}

void save_model(const std::string& path, const MlModel& model,
                const std::string& provenance_json) {
  nlohmann::json j;
  j["layer_sizes"] = model.params.spec.layer_sizes;
  auto acts = nlohmann::json::array();
  for (Act a : model.params.spec.activations) acts.push_back(a == Act::Linear ? "linear" : "relu");
  j["activations"] = std::move(acts);
  j["weights"] = model.params.weights;
  j["biases"] = model.params.biases;
  if (model.db_inputs)
    j["input_db_normalizer"] = {{"floor_dbm", model.in_db.floor_dbm},
                                {"min_db", model.in_db.min_db},
                                {"max_db", model.in_db.max_db}};
  else
    j["input_normalizer"] = {{"median", model.in_norm.median},
                             {"iqr", model.in_norm.iqr},
                             {"passthrough", std::vector<int>(model.in_norm.passthrough.begin(),
                                                              model.in_norm.passthrough.end())}};
  j["output_normalizer"] = {{"floor_dbm", model.out_norm.floor_dbm},
                            {"min_db", model.out_norm.min_db},
                            {"max_db", model.out_norm.max_db}};
  j["provenance"] = nlohmann::json::parse(provenance_json.empty() ? "{}" : provenance_json);

  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("save_model: cannot open " + path);
  os << j.dump(2) << '\n';
  if (!os) throw std::runtime_error("save_model: write failed for " + path);
}

MlModel load_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_model: cannot open " + path);
  nlohmann::json j;
  is >> j;

  MlModel model;
  model.params.spec.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  for (const auto& a : j.at("activations"))
    model.params.spec.activations.push_back(a.get<std::string>() == "linear" ? Act::Linear
                                                                             : Act::Relu);
  model.params.spec.validate();
  model.params.weights = j.at("weights").get<std::vector<RVec>>();
  model.params.biases = j.at("biases").get<std::vector<RVec>>();
  if (j.contains("input_db_normalizer")) {
    model.db_inputs = true;
    const auto& in = j.at("input_db_normalizer");
    model.in_db.floor_dbm = in.at("floor_dbm").get<double>();
    model.in_db.min_db = in.at("min_db").get<RVec>();
    model.in_db.max_db = in.at("max_db").get<RVec>();
  } else {
    const auto& in = j.at("input_normalizer");
    model.in_norm.median = in.at("median").get<RVec>();
    model.in_norm.iqr = in.at("iqr").get<RVec>();
    for (int v : in.at("passthrough").get<std::vector<int>>())
      model.in_norm.passthrough.push_back(v != 0);
  }
  const auto& out = j.at("output_normalizer");
  model.out_norm.floor_dbm = out.at("floor_dbm").get<double>();
  model.out_norm.min_db = out.at("min_db").get<RVec>();
  model.out_norm.max_db = out.at("max_db").get<RVec>();
  return model;
}

} // namespace cfpc
