#include "cfpc/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace cfpc {

namespace {

MlpSpec make_spec(std::vector<int> sizes) {
  MlpSpec spec;
  spec.layer_sizes = std::move(sizes);
  const int L = spec.num_layers();
  spec.activations.assign(L, Act::Relu);
  if (L > 0) spec.activations[0] = Act::Linear; // first hidden layer
  spec.validate();
  return spec;
}

} // namespace

MlpSpec MlpSpec::dl_e2e(int in_out) {
  return make_spec({in_out, 1024, 512, 256, 128, 64, in_out});
}

MlpSpec MlpSpec::ul_e2e(int in_out) { return make_spec({in_out, 64, 32, 16, in_out}); }

MlpSpec MlpSpec::unfolded_stage(int in_out) { return make_spec({in_out, 128, in_out}); }

std::size_t MlpSpec::param_count() const {
  std::size_t total = 0;
  for (int l = 0; l + 1 < static_cast<int>(layer_sizes.size()); ++l)
    total += static_cast<std::size_t>(layer_sizes[l] + 1) * layer_sizes[l + 1];
  return total;
}

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2) throw std::invalid_argument("MlpSpec: need input and output layers");
  for (int s : layer_sizes)
    if (s < 1) throw std::invalid_argument("MlpSpec: layer sizes must be positive");
  if (activations.size() != layer_sizes.size() - 1)
    throw std::invalid_argument("MlpSpec: one activation per non-input layer required");
}

MlpParams init_params(const MlpSpec& spec, Rng& rng) {
  spec.validate();
  MlpParams p;
  p.spec = spec;
  const int L = spec.num_layers();
  p.weights.resize(L);
  p.biases.resize(L);
  for (int l = 0; l < L; ++l) {
    const int fan_in = spec.layer_sizes[l];
    const int fan_out = spec.layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    p.weights[l].resize(static_cast<size_t>(fan_out) * fan_in);
    for (auto& w : p.weights[l]) w = rng.uniform(-bound, bound);
    p.biases[l].assign(fan_out, 0.0);
  }
  return p;
}

RVec mlp_forward(const MlpParams& params, const RVec& x, std::vector<RVec>* acts,
                 std::vector<RVec>* preacts) {
  const MlpSpec& spec = params.spec;
  if (static_cast<int>(x.size()) != spec.layer_sizes[0])
    throw std::invalid_argument("mlp_forward: input dimension mismatch");
  const int L = spec.num_layers();
  if (acts) {
    acts->clear();
    acts->push_back(x);
  }
  if (preacts) preacts->clear();

  RVec a = x;
  for (int l = 0; l < L; ++l) {
    const int in = spec.layer_sizes[l];
    const int out = spec.layer_sizes[l + 1];
    RVec z(out);
    const RVec& W = params.weights[l];
    for (int o = 0; o < out; ++o) {
      double acc = params.biases[l][o];
      const double* row = W.data() + static_cast<size_t>(o) * in;
      for (int i = 0; i < in; ++i) acc += row[i] * a[i];
      z[o] = acc;
    }
    if (preacts) preacts->push_back(z);
    if (spec.activations[l] == Act::Relu)
      for (auto& v : z) v = v > 0.0 ? v : 0.0;
    a = std::move(z);
    if (acts) acts->push_back(a);
  }
  return a;
}

MlpGrads zero_grads(const MlpSpec& spec) {
  MlpGrads g;
  const int L = spec.num_layers();
  g.weights.resize(L);
  g.biases.resize(L);
  for (int l = 0; l < L; ++l) {
    g.weights[l].assign(static_cast<size_t>(spec.layer_sizes[l + 1]) * spec.layer_sizes[l], 0.0);
    g.biases[l].assign(spec.layer_sizes[l + 1], 0.0);
  }
  return g;
}

double mlp_loss_and_grads(const MlpParams& params, const std::vector<RVec>& xs,
                          const std::vector<RVec>& ys, double l2, MlpGrads& grads) {
  const MlpSpec& spec = params.spec;
  const int L = spec.num_layers();
  const int out_dim = spec.layer_sizes.back();
  if (xs.size() != ys.size() || xs.empty())
    throw std::invalid_argument("mlp_loss_and_grads: empty or mismatched batch");

  const double inv = 1.0 / (static_cast<double>(xs.size()) * out_dim);
  double data_loss = 0.0;
  std::vector<RVec> acts, preacts;
  for (size_t s = 0; s < xs.size(); ++s) {
    const RVec yhat = mlp_forward(params, xs[s], &acts, &preacts);
    RVec delta(out_dim);
    for (int o = 0; o < out_dim; ++o) {
      const double err = yhat[o] - ys[s][o];
      data_loss += std::abs(err) * inv;
      delta[o] = (err > 0.0 ? 1.0 : (err < 0.0 ? -1.0 : 0.0)) * inv;
    }
    // Backward sweep: delta holds dLoss/d(post-activation of layer l).
    for (int l = L - 1; l >= 0; --l) {
      const int in = spec.layer_sizes[l];
      const int out = spec.layer_sizes[l + 1];
      if (spec.activations[l] == Act::Relu)
        for (int o = 0; o < out; ++o)
          if (!(preacts[l][o] > 0.0)) delta[o] = 0.0;
      const RVec& a_prev = acts[l];
      RVec* gw = &grads.weights[l];
      for (int o = 0; o < out; ++o) {
        const double d = delta[o];
        if (d != 0.0) {
          double* row = gw->data() + static_cast<size_t>(o) * in;
          for (int i = 0; i < in; ++i) row[i] += d * a_prev[i];
        }
        grads.biases[l][o] += d;
      }
      if (l > 0) {
        RVec next(in, 0.0);
        const RVec& W = params.weights[l];
        for (int o = 0; o < out; ++o) {
          const double d = delta[o];
          if (d != 0.0) {
            const double* row = W.data() + static_cast<size_t>(o) * in;
            for (int i = 0; i < in; ++i) next[i] += d * row[i];
          }
        }
        delta = std::move(next);
      }
    }
  }

  double reg = 0.0;
  if (l2 > 0.0) {
    for (int l = 0; l < L; ++l) {
      const RVec& W = params.weights[l];
      RVec& gw = grads.weights[l];
      for (size_t i = 0; i < W.size(); ++i) {
        reg += W[i] * W[i];
        gw[i] += l2 * W[i];
      }
    }
    reg *= 0.5 * l2;
  }
  return data_loss + reg;
}

double mlp_loss(const MlpParams& params, const std::vector<RVec>& xs, const std::vector<RVec>& ys,
                double l2) {
  const int out_dim = params.spec.layer_sizes.back();
  if (xs.size() != ys.size() || xs.empty())
    throw std::invalid_argument("mlp_loss: empty or mismatched batch");
  const double inv = 1.0 / (static_cast<double>(xs.size()) * out_dim);
  double loss = 0.0;
  for (size_t s = 0; s < xs.size(); ++s) {
    const RVec yhat = mlp_forward(params, xs[s]);
    for (int o = 0; o < out_dim; ++o) loss += std::abs(yhat[o] - ys[s][o]) * inv;
  }
  if (l2 > 0.0) {
    double reg = 0.0;
    for (const auto& W : params.weights)
      for (double w : W) reg += w * w;
    loss += 0.5 * l2 * reg;
  }
  return loss;
}

AdamState init_adam(const MlpSpec& spec) {
  AdamState st;
  const int L = spec.num_layers();
  st.m_w.resize(L);
  st.v_w.resize(L);
  st.m_b.resize(L);
  st.v_b.resize(L);
  for (int l = 0; l < L; ++l) {
    const size_t nw = static_cast<size_t>(spec.layer_sizes[l + 1]) * spec.layer_sizes[l];
    st.m_w[l].assign(nw, 0.0);
    st.v_w[l].assign(nw, 0.0);
    st.m_b[l].assign(spec.layer_sizes[l + 1], 0.0);
    st.v_b[l].assign(spec.layer_sizes[l + 1], 0.0);
  }
  return st;
}

void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state, double lr,
               double beta1, double beta2, double eps) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  auto update = [&](RVec& w, const RVec& g, RVec& m, RVec& v) {
    for (size_t i = 0; i < w.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  };
  const int L = params.spec.num_layers();
  for (int l = 0; l < L; ++l) {
    update(params.weights[l], grads.weights[l], state.m_w[l], state.v_w[l]);
    update(params.biases[l], grads.biases[l], state.m_b[l], state.v_b[l]);
  }
}

} // namespace cfpc
