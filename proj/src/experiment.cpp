#include "cfpc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "cfpc/beamforming.hpp"
#include "cfpc/csi.hpp"
#include "cfpc/heuristics.hpp"
#include "cfpc/metrics.hpp"
#include "cfpc/ml.hpp"
#include "cfpc/normalizer.hpp"
#include "cfpc/optimizer.hpp"
#include "cfpc/scenario.hpp"

namespace cfpc {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Everything one trial derives from its seed.
struct TrialContext {
  Deployment dep;
  LargeScaleState ls;
  ChannelRealization ch;
  ChannelEstimateSet est;
  BeamformerSet beams;
  EffectiveGains gains;
};

TrialContext make_trial(const ExperimentConfig& cfg, std::uint64_t trial_seed) {
  TrialContext ctx;
  auto dep_ls = generate_deployment(cfg.system, trial_seed);
  ctx.dep = std::move(dep_ls.first);
  ctx.ls = std::move(dep_ls.second);
  Rng ch_rng(Rng::derive(trial_seed, 1001));
  ctx.ch = draw_channels(ctx.dep, ctx.ls, cfg.system, ch_rng);
  const PilotBook pilots = assign_pilots(cfg.system);
  Rng est_rng(Rng::derive(trial_seed, 1002));
  ctx.est = estimate_channels(ctx.ch, ctx.ls, pilots, cfg.system, est_rng);
  ctx.beams = cfg.beamformer == "rzf" ? rzf_combiners(ctx.est, ctx.dep, cfg.system)
                                      : conjugate_beamformers(ctx.est, ctx.dep, cfg.system);
  const EvalMode mode = cfg.eval_mode == "true" ? EvalMode::TrueChannel : EvalMode::Estimated;
  ctx.gains = build_gains(ctx.dep, ctx.ch, &ctx.est, ctx.beams, cfg.system, mode);
  return ctx;
}

// DL feature vector: fractional power control with exponent 0.5, flattened
// over the serving clusters. Doubles as the network input everywhere.
RVec dl_features(const TrialContext& ctx, const SystemConfig& sys) {
  const PowerAllocationDL fpc = fpc_dl(ctx.ls, ctx.dep, sys, 0.5);
  RVec x(static_cast<size_t>(ctx.gains.K) * ctx.gains.N, 0.0);
  for (int k = 0; k < ctx.gains.K; ++k)
    for (int i = 0; i < ctx.gains.N; ++i)
      x[static_cast<size_t>(k) * ctx.gains.N + i] = fpc.at(k, ctx.gains.cluster[k][i]);
  return x;
}

RVec ul_features(const TrialContext& ctx, const SystemConfig& sys) {
  return fpc_ul(ctx.ls, ctx.dep, sys, -0.5).q;
}

RVec flat_dl_powers(const PowerAllocationDL& alloc, const EffectiveGains& gains) {
  RVec y(static_cast<size_t>(gains.K) * gains.N, 0.0);
  for (int k = 0; k < gains.K; ++k)
    for (int i = 0; i < gains.N; ++i)
      y[static_cast<size_t>(k) * gains.N + i] = alloc.at(k, gains.cluster[k][i]);
  return y;
}

// Preloaded network models for the data-driven policies.
struct LoadedModels {
  bool have_e2e = false;
  MlModel e2e;
  std::vector<MlModel> stages;
};

LoadedModels load_models(const ExperimentConfig& cfg) {
  LoadedModels models;
  for (const auto& p : cfg.policies) {
    if (p == "e2e-dnn") {
      if (cfg.model_path.empty())
        throw ConfigError("config: policy e2e-dnn requires ml.model_path");
      models.e2e = load_model(cfg.model_path);
      models.have_e2e = true;
    } else if (p == "u-dnn") {
      if (cfg.stage_model_paths.empty())
        throw ConfigError("config: policy u-dnn requires ml.stage_model_paths");
      for (const auto& path : cfg.stage_model_paths) models.stages.push_back(load_model(path));
    }
  }
  return models;
}

// Reject policy/direction pairs up front so workers never hit them.
void check_policies(const ExperimentConfig& cfg) {
  for (const auto& p : cfg.policies) {
    if (cfg.direction == "ul" && (p == "opc-lse" || p == "u-dnn"))
      throw ConfigError("config: policy '" + p + "' is not available for direction ul");
  }
}

// Allocation produced by one policy on one trial, before evaluation.
struct PolicyAllocation {
  PowerAllocationDL dl;
  PowerAllocationUL ul;
  std::string diagnostics; // non-empty for the model-based solvers
};

PolicyAllocation compute_allocation(const std::string& policy, const TrialContext& ctx,
                                    const ExperimentConfig& cfg, const LoadedModels& models) {
  const SystemConfig& sys = cfg.system;
  PolicyAllocation out;
  if (cfg.direction == "dl") {
    if (policy == "upc") {
      out.dl = fpc_dl(ctx.ls, ctx.dep, sys, 0.0);
    } else if (policy == "fpc-fair") {
      out.dl = fpc_dl(ctx.ls, ctx.dep, sys, -0.5);
    } else if (policy == "fpc-opp") {
      out.dl = fpc_dl(ctx.ls, ctx.dep, sys, 0.5);
    } else if (policy == "opc-maximin" || policy == "opc-lse") {
      const PowerAllocationDL init =
          initial_dl_allocation(ctx.gains, sys, fpc_dl(ctx.ls, ctx.dep, sys, 0.5));
      const AllocationResult res = policy == "opc-maximin"
                                       ? dl_maximin_bisection(ctx.gains, sys, cfg.solver, init)
                                       : dl_lse_sco(ctx.gains, sys, cfg.solver, init);
      out.dl = res.dl;
      out.diagnostics = diagnostics_json(res, policy);
    } else if (policy == "e2e-dnn") {
      out.dl = predict_dl(models.e2e, dl_features(ctx, sys), ctx.gains, sys);
    } else if (policy == "u-dnn") {
      const RVec raw = predict_unfolded_raw(models.stages, dl_features(ctx, sys));
      out.dl = project_dl(raw, ctx.gains, sys);
    } else {
      throw ConfigError("config: policy '" + policy + "' is not available for direction dl");
    }
  } else {
    if (policy == "upc") {
      out.ul = fpc_ul(ctx.ls, ctx.dep, sys, 0.0);
    } else if (policy == "fpc-fair") {
      out.ul = fpc_ul(ctx.ls, ctx.dep, sys, -0.5);
    } else if (policy == "fpc-opp") {
      out.ul = fpc_ul(ctx.ls, ctx.dep, sys, 0.5);
    } else if (policy == "opc-maximin") {
      const AllocationResult res = ul_maximin_bisection(ctx.gains, sys, cfg.solver);
      out.ul = res.ul;
      out.diagnostics = diagnostics_json(res, policy);
    } else if (policy == "e2e-dnn") {
      out.ul = predict_ul(models.e2e, ul_features(ctx, sys), sys);
    } else {
      throw ConfigError("config: policy '" + policy + "' is not available for direction ul");
    }
  }
  return out;
}

struct PolicyOutcome {
  bool failed = false;
  RVec rate_bps, ipd_wm2, sar_wkg;
  double min_rate_bps = 0.0;
  bool violation = false;
  std::string diagnostics;
};

PolicyOutcome evaluate_allocation(const PolicyAllocation& alloc, const TrialContext& ctx,
                                  const ExperimentConfig& cfg) {
  const SystemConfig& sys = cfg.system;
  PolicyOutcome out;
  out.diagnostics = alloc.diagnostics;
  const int K = ctx.gains.K;
  if (cfg.direction == "dl") {
    out.rate_bps = rates(dl_sinr(alloc.dl, ctx.gains), sys, Direction::Downlink);
    out.ipd_wm2 = ipd(alloc.dl, ctx.gains);
    out.sar_wkg.assign(K, 0.0);
    out.violation = dl_compliance(alloc.dl, ctx.gains, sys).worst() > 1e-6;
  } else {
    out.rate_bps = rates(ul_sinr(alloc.ul, ctx.gains), sys, Direction::Uplink);
    out.ipd_wm2.assign(K, 0.0);
    const auto sar_all = sar(alloc.ul, sys);
    out.sar_wkg.resize(K);
    for (int k = 0; k < K; ++k) out.sar_wkg[k] = sar_all[k].empty() ? 0.0 : sar_all[k][0];
    out.violation = ul_compliance(alloc.ul, sys).worst() > 1e-6;
  }
  out.min_rate_bps = min_rate(out.rate_bps);
  return out;
}

// Run fn(trial_index) over [0, n) on a small worker pool; deterministic
// because each trial derives its own seed.
template <typename Fn>
void run_pool(int n, Fn&& fn) {
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(1, n)));
  if (workers <= 1) {
    for (int t = 0; t < n; ++t) fn(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    threads.emplace_back([&]() {
      for (int t = next.fetch_add(1); t < n; t = next.fetch_add(1)) fn(t);
    });
  for (auto& th : threads) th.join();
}

nlohmann::json percentile_block(RVec values) {
  nlohmann::json j;
  if (values.empty()) {
    for (const char* key : {"p05", "p25", "p50", "p75", "p95"}) j[key] = 0.0;
    return j;
  }
  j["p05"] = interpolated_quantile(values, 0.05);
  j["p25"] = interpolated_quantile(values, 0.25);
  j["p50"] = interpolated_quantile(values, 0.50);
  j["p75"] = interpolated_quantile(values, 0.75);
  j["p95"] = interpolated_quantile(values, 0.95);
  return j;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string solver_hash(const SolverConfig& s) {
  std::string blob;
  for (double v : {s.eps1_rel, s.eps_sco, s.eps_lse, s.upsilon, s.barrier_t0, s.barrier_mult,
                   s.barrier_gap})
    blob += fmt17(v) + ",";
  blob += std::to_string(s.max_sco_iters) + "," + std::to_string(s.max_bisect_iters) + "," +
          std::to_string(s.max_newton_iters);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(blob)));
  return buf;
}

nlohmann::json system_block(const SystemConfig& sys) {
  return {{"num_ues", sys.num_ues},
          {"num_aps", sys.num_aps},
          {"antennas_per_ap", sys.antennas_per_ap},
          {"cluster_size", sys.cluster_size}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path);
}

} // namespace

int cmd_simulate(const ExperimentConfig& cfg) {
  cfg.validate();
  check_policies(cfg);
  const LoadedModels models = load_models(cfg);
  fs::create_directories(cfg.out_dir);

  const int K = cfg.system.num_ues;
  const size_t n_policies = cfg.policies.size();
  std::vector<std::vector<PolicyOutcome>> outcomes(
      static_cast<size_t>(cfg.trials), std::vector<PolicyOutcome>(n_policies));

  run_pool(cfg.trials, [&](int t) {
    const std::uint64_t trial_seed = Rng::derive(cfg.seed, static_cast<std::uint64_t>(t));
    TrialContext ctx;
    bool trial_ok = true;
    try {
      ctx = make_trial(cfg, trial_seed);
    } catch (const std::exception&) {
      trial_ok = false;
    }
    for (size_t p = 0; p < n_policies; ++p) {
      if (!trial_ok) {
        outcomes[t][p].failed = true;
        continue;
      }
      try {
        const PolicyAllocation alloc = compute_allocation(cfg.policies[p], ctx, cfg, models);
        outcomes[t][p] = evaluate_allocation(alloc, ctx, cfg);
      } catch (const std::exception&) {
        outcomes[t][p].failed = true;
      }
    }
  });

  nlohmann::json summary;
  summary["direction"] = cfg.direction;
  summary["beamformer"] = cfg.beamformer;
  summary["eval_mode"] = cfg.eval_mode;
  summary["trials"] = cfg.trials;
  summary["seed"] = cfg.seed;

  std::ofstream diag(fs::path(cfg.out_dir) / "diagnostics.jsonl", std::ios::trunc);
  for (size_t p = 0; p < n_policies; ++p) {
    const std::string& name = cfg.policies[p];
    std::ofstream csv(fs::path(cfg.out_dir) / (name + ".csv"), std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot open policy CSV for " + name);
    csv << "trial,ue,rate_bps,ipd_wm2,sar_wkg\n";
    int failures = 0, violations = 0;
    RVec min_rates;
    for (int t = 0; t < cfg.trials; ++t) {
      const PolicyOutcome& o = outcomes[t][p];
      if (o.failed) {
        ++failures;
        continue;
      }
      if (o.violation) ++violations;
      min_rates.push_back(o.min_rate_bps);
      for (int k = 0; k < K; ++k)
        csv << t << ',' << k << ',' << fmt17(o.rate_bps[k]) << ',' << fmt17(o.ipd_wm2[k]) << ','
            << fmt17(o.sar_wkg[k]) << '\n';
      if (!o.diagnostics.empty()) {
        nlohmann::json rec = nlohmann::json::parse(o.diagnostics);
        rec["trial"] = t;
        diag << rec.dump() << '\n';
      }
    }
    summary["policies"][name] = {{"failures", failures},
                                 {"violations", violations},
                                 {"min_rate_bps", percentile_block(min_rates)}};
  }
  write_text((fs::path(cfg.out_dir) / "summary.json").string(), summary.dump(2) + "\n");
  return 0;
}

int cmd_dataset(const ExperimentConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  const int n = cfg.samples;

  std::vector<std::string> written;
  try {
    Dataset main_ds;
    main_ds.X.resize(n);
    main_ds.Y.resize(n);
    Dataset unfolded_ds;
    Dataset traces_ds;
    const bool unfold = cfg.direction == "dl" && cfg.unfold;
    if (unfold) {
      unfolded_ds.X.resize(n);
      unfolded_ds.Y.resize(n);
      traces_ds.X.resize(static_cast<size_t>(n) * cfg.stages);
      traces_ds.Y.resize(static_cast<size_t>(n) * cfg.stages);
    }

    std::atomic<bool> had_error{false};
    std::string first_error;
    std::mutex error_mutex;
    auto record_error = [&](const std::string& msg) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!had_error.exchange(true)) first_error = msg;
    };

    run_pool(n, [&](int s) {
      if (had_error.load()) return;
      try {
      const std::uint64_t sample_seed = Rng::derive(cfg.seed, static_cast<std::uint64_t>(s));
      const TrialContext ctx = make_trial(cfg, sample_seed);
      if (cfg.direction == "dl") {
        const RVec x = dl_features(ctx, cfg.system);
        const PowerAllocationDL init = initial_dl_allocation(
            ctx.gains, cfg.system, fpc_dl(ctx.ls, ctx.dep, cfg.system, 0.5));
        const AllocationResult res =
            dl_maximin_bisection(ctx.gains, cfg.system, cfg.solver, init);
        main_ds.X[s] = x;
        main_ds.Y[s] = flat_dl_powers(res.dl, ctx.gains);
        if (unfold) {
          const AllocationResult lse = dl_lse_sco(ctx.gains, cfg.system, cfg.solver, init);
          unfolded_ds.X[s] = x;
          unfolded_ds.Y[s] = flat_dl_powers(lse.dl, ctx.gains);
          for (int st = 0; st < cfg.stages; ++st) {
            const size_t last = lse.iterate_trace.size() - 1;
            const RVec& d = lse.iterate_trace[std::min<size_t>(st + 1, last)];
            RVec p(d.size());
            for (size_t i = 0; i < d.size(); ++i) p[i] = d[i] * d[i];
            traces_ds.X[static_cast<size_t>(s) * cfg.stages + st] = x;
            traces_ds.Y[static_cast<size_t>(s) * cfg.stages + st] = std::move(p);
          }
        }
      } else {
        main_ds.X[s] = ul_features(ctx, cfg.system);
        const AllocationResult res = ul_maximin_bisection(ctx.gains, cfg.system, cfg.solver);
        main_ds.Y[s] = res.ul.q;
      }
      } catch (const std::exception& e) {
        record_error("sample " + std::to_string(s) + ": " + e.what());
      }
    });
    if (had_error.load()) throw std::runtime_error("cmd_dataset: " + first_error);

    auto sidecar = [&](const Dataset& ds, const std::string& label_policy,
                       int rows_per_sample) {
      nlohmann::json j;
      j["rows"] = ds.rows();
      j["in_cols"] = ds.in_cols();
      j["out_cols"] = ds.out_cols();
      j["direction"] = cfg.direction;
      j["beamformer"] = cfg.beamformer;
      j["eval_mode"] = cfg.eval_mode;
      j["seed"] = cfg.seed;
      j["samples"] = cfg.samples;
      j["rows_per_sample"] = rows_per_sample;
      j["label_policy"] = label_policy;
      j["solver_hash"] = solver_hash(cfg.solver);
      j["system"] = system_block(cfg.system);
      return j.dump(2) + "\n";
    };

    const std::string main_bin = (fs::path(cfg.out_dir) / "dataset.bin").string();
    save_dataset(main_bin, main_ds);
    written.push_back(main_bin);
    write_text((fs::path(cfg.out_dir) / "dataset.json").string(),
               sidecar(main_ds, "opc-maximin", 1));
    if (unfold) {
      const std::string ub = (fs::path(cfg.out_dir) / "unfolded.bin").string();
      save_dataset(ub, unfolded_ds);
      written.push_back(ub);
      write_text((fs::path(cfg.out_dir) / "unfolded.json").string(),
                 sidecar(unfolded_ds, "opc-lse", 1));
      const std::string tb = (fs::path(cfg.out_dir) / "traces.bin").string();
      save_dataset(tb, traces_ds);
      written.push_back(tb);
      write_text((fs::path(cfg.out_dir) / "traces.json").string(),
                 sidecar(traces_ds, "opc-lse-iterates", cfg.stages));
    }
  } catch (...) {
    for (const auto& f : written) {
      std::error_code ec;
      fs::remove(f, ec);
    }
    throw;
  }
  return 0;
}

int cmd_train(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.dataset_path.empty()) throw ConfigError("config: cmd train requires ml.dataset_path");
  const Dataset ds = load_dataset(cfg.dataset_path);

  // Cross-check the sidecar direction when present.
  {
    fs::path side = cfg.dataset_path;
    side.replace_extension(".json");
    std::ifstream is(side);
    if (is) {
      nlohmann::json j;
      is >> j;
      if (j.contains("direction") && j["direction"].get<std::string>() != cfg.direction)
        throw ConfigError("config: dataset direction '" +
                          j["direction"].get<std::string>() + "' does not match run direction '" +
                          cfg.direction + "'");
    }
  }

  TrainConfig tcfg = cfg.train;
  tcfg.batch_size = resolve_batch_size(cfg);
  try {
    tcfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  fs::create_directories(cfg.out_dir);
  const std::string provenance =
      nlohmann::json{{"dataset", cfg.dataset_path},
                     {"rows", ds.rows()},
                     {"seed", tcfg.seed},
                     {"direction", cfg.direction},
                     {"solver_hash", solver_hash(cfg.solver)}}
          .dump();

  auto write_curve = [&](const std::string& path, const std::vector<EpochStats>& curve) {
    std::ofstream os(path, std::ios::trunc);
    os << "epoch,train_loss,val_loss\n";
    for (size_t e = 0; e < curve.size(); ++e)
      os << (e + 1) << ',' << fmt17(curve[e].train_loss) << ',' << fmt17(curve[e].val_loss)
         << '\n';
    if (!os) throw std::runtime_error("write failed for " + path);
  };

  if (cfg.unfold) {
    if (ds.in_cols() != ds.out_cols())
      throw ConfigError("config: unfolded training expects matching feature/label widths");
    const UnfoldedTrainResult res = train_unfolded(ds, tcfg, cfg.stages);
    nlohmann::json summary;
    for (int s = 0; s < cfg.stages; ++s) {
      const std::string tag = "stage" + std::to_string(s + 1);
      save_model((fs::path(cfg.out_dir) / ("model_" + tag + ".json")).string(), res.stages[s],
                 provenance);
      write_curve((fs::path(cfg.out_dir) / ("loss_" + tag + ".csv")).string(),
                  res.stage_results[s].curve);
      summary["stage_test_mae"].push_back(res.stage_test_mae[s]);
      summary["best_epoch"].push_back(res.stage_results[s].best_epoch);
    }
    write_text((fs::path(cfg.out_dir) / "train_summary.json").string(), summary.dump(2) + "\n");
    return 0;
  }

  MlpSpec spec;
  if (cfg.direction == "dl") {
    if (ds.in_cols() != ds.out_cols())
      throw ConfigError("config: DL training expects feature width == label width");
    spec = MlpSpec::dl_e2e(ds.in_cols());
  } else {
    if (ds.in_cols() != ds.out_cols())
      throw ConfigError("config: UL training expects feature width == label width");
    spec = MlpSpec::ul_e2e(ds.in_cols());
  }

  const TrainResult res = train_e2e(ds, spec, tcfg);
  save_model((fs::path(cfg.out_dir) / "model.json").string(), res.best, provenance);
  write_curve((fs::path(cfg.out_dir) / "loss.csv").string(), res.curve);
  nlohmann::json summary = {{"best_epoch", res.best_epoch},
                            {"final_train_loss", res.curve.back().train_loss},
                            {"final_val_loss", res.curve.back().val_loss}};
  write_text((fs::path(cfg.out_dir) / "train_summary.json").string(), summary.dump(2) + "\n");
  return 0;
}

int cmd_bench(const ExperimentConfig& cfg) {
  cfg.validate();
  check_policies(cfg);
  const LoadedModels models = load_models(cfg);
  fs::create_directories(cfg.out_dir);

  const size_t n_policies = cfg.policies.size();
  std::vector<std::vector<double>> times(n_policies);

  for (int t = 0; t < cfg.trials; ++t) {
    const std::uint64_t trial_seed = Rng::derive(cfg.seed, static_cast<std::uint64_t>(t));
    const TrialContext ctx = make_trial(cfg, trial_seed);
    for (size_t p = 0; p < n_policies; ++p) {
      const auto t0 = std::chrono::steady_clock::now();
      (void)compute_allocation(cfg.policies[p], ctx, cfg, models);
      const auto t1 = std::chrono::steady_clock::now();
      times[p].push_back(std::chrono::duration<double>(t1 - t0).count());
    }
  }

  std::ofstream csv(fs::path(cfg.out_dir) / "bench.csv", std::ios::trunc);
  csv << "policy,mean_s,std_s\n";
  nlohmann::json summary;
  for (size_t p = 0; p < n_policies; ++p) {
    double mean = 0.0, sd = 0.0;
    const auto& v = times[p];
    if (!v.empty()) {
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      if (v.size() > 1) {
        for (double x : v) sd += (x - mean) * (x - mean);
        sd = std::sqrt(sd / static_cast<double>(v.size() - 1));
      }
      csv << cfg.policies[p] << ',' << fmt17(mean) << ',' << fmt17(sd) << '\n';
    }
    summary["mean_s"][cfg.policies[p]] = mean;
  }

  auto mean_of = [&](const std::string& name) -> double {
    for (size_t p = 0; p < n_policies; ++p)
      if (cfg.policies[p] == name && !times[p].empty()) {
        double m = 0.0;
        for (double x : times[p]) m += x;
        return m / static_cast<double>(times[p].size());
      }
    return -1.0;
  };
  const double t_dnn = std::max(mean_of("e2e-dnn"), mean_of("u-dnn"));
  const double t_lse = mean_of("opc-lse");
  const double t_maximin = mean_of("opc-maximin");
  if (t_lse > 0.0 && t_maximin > 0.0) {
    summary["ratio_maximin_over_lse"] = t_maximin / t_lse;
    summary["flag_ratio_lt_1"] = t_maximin / t_lse < 1.0;
    if (t_dnn > 0.0) summary["ordering_ok"] = t_dnn < t_lse && t_lse < t_maximin;
  }
  write_text((fs::path(cfg.out_dir) / "bench_summary.json").string(), summary.dump(2) + "\n");
  return 0;
}

} // namespace cfpc
