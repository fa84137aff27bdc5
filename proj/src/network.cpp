#include "pa3c/network.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "pa3c/errors.hpp"

namespace pa3c {

namespace {

constexpr int kK = NetworkSpec::kKernel;
constexpr int kS1 = NetworkSpec::kConv1Size;
constexpr int kS2 = NetworkSpec::kConv2Size;
constexpr int kP1 = kS1 * kS1;  // conv1 output positions
constexpr int kP2 = kS2 * kS2;  // conv2 output positions

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return Scalar(1) / (Scalar(1) + std::exp(-x));
}

}  // namespace

ParamLayout::ParamLayout(const NetworkSpec& spec) {
  const int l = spec.lstm_units;
  add("conv1/w", {kK * kK * spec.input_channels, spec.conv1_filters});
  add("conv1/b", {spec.conv1_filters});
  add("conv2/w", {kK * kK * spec.conv1_filters, spec.conv2_filters});
  add("conv2/b", {spec.conv2_filters});
  add("dense/w", {spec.dense_units, spec.flat_size()});
  add("dense/b", {spec.dense_units});
  add("lstm/wx", {4 * l, spec.lstm_input_size()});
  add("lstm/wh", {4 * l, l});
  add("lstm/b", {4 * l});
  add("policy/w", {kNumActions, l});
  add("policy/b", {kNumActions});
  add("value/w", {1, l});
  add("value/b", {1});
}

void ParamLayout::add(std::string name, std::vector<int> shape) {
  std::size_t size = 1;
  for (int d : shape) size *= static_cast<std::size_t>(d);
  entries_.push_back({std::move(name), std::move(shape), total_, size});
  total_ += size;
}

const ParamEntry& ParamLayout::find(const std::string& name) const {
  for (const ParamEntry& e : entries_) {
    if (e.name == name) return e;
  }
  throw std::out_of_range("no parameter named '" + name + "'");
}

namespace {

// Typed views over one flat parameter (or gradient) vector.
template <typename Scalar, typename Ptr>
struct Views {
  using Mat = std::conditional_t<std::is_const_v<std::remove_pointer_t<Ptr>>,
                                 Eigen::Map<const Matrix<Scalar>>, Eigen::Map<Matrix<Scalar>>>;
  using Vec = std::conditional_t<std::is_const_v<std::remove_pointer_t<Ptr>>,
                                 Eigen::Map<const Vector<Scalar>>, Eigen::Map<Vector<Scalar>>>;

  Views(const ParamLayout& layout, Ptr base)
      : conv1_w(mat(layout, base, "conv1/w")),
        conv1_b(vec(layout, base, "conv1/b")),
        conv2_w(mat(layout, base, "conv2/w")),
        conv2_b(vec(layout, base, "conv2/b")),
        dense_w(mat(layout, base, "dense/w")),
        dense_b(vec(layout, base, "dense/b")),
        lstm_wx(mat(layout, base, "lstm/wx")),
        lstm_wh(mat(layout, base, "lstm/wh")),
        lstm_b(vec(layout, base, "lstm/b")),
        policy_w(mat(layout, base, "policy/w")),
        policy_b(vec(layout, base, "policy/b")),
        value_w(mat(layout, base, "value/w")),
        value_b(vec(layout, base, "value/b")) {}

  static Mat mat(const ParamLayout& layout, Ptr base, const char* name) {
    const ParamEntry& e = layout.find(name);
    return Mat(base + e.offset, e.shape[0], e.shape[1]);
  }
  static Vec vec(const ParamLayout& layout, Ptr base, const char* name) {
    const ParamEntry& e = layout.find(name);
    return Vec(base + e.offset, e.shape[0]);
  }

  Mat conv1_w;
  Vec conv1_b;
  Mat conv2_w;
  Vec conv2_b;
  Mat dense_w;
  Vec dense_b;
  Mat lstm_wx;
  Mat lstm_wh;
  Vec lstm_b;
  Mat policy_w;
  Vec policy_b;
  Mat value_w;
  Vec value_b;
};

}  // namespace

template <typename Scalar>
struct Network<Scalar>::TowerCache {
  int steps = 0;
  Matrix<Scalar> p1;    // (225 T) x (9 C) im2col of the observations
  Matrix<Scalar> a1;    // (225 T) x K1, post-ReLU
  Matrix<Scalar> p2;    // (169 T) x (9 K1)
  Matrix<Scalar> a2;    // (169 T) x K2, post-ReLU
  Matrix<Scalar> flat;  // (169 K2) x T
  Matrix<Scalar> a3;    // D x T, post-ReLU
};

template <typename Scalar>
Network<Scalar>::Network(const NetworkSpec& spec)
    : spec_(spec), layout_(spec), params_(Vector<Scalar>::Zero(layout_.total_size())) {}

template <typename Scalar>
void Network<Scalar>::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  params_.setZero();
  for (const ParamEntry& e : layout_.entries()) {
    if (e.shape.size() != 2) continue;  // biases stay zero
    // conv weights are stored (fan_in x filters), dense-style ones (out x fan_in)
    const bool conv = e.name.rfind("conv", 0) == 0;
    const int fan_in = conv ? e.shape[0] : e.shape[1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t i = 0; i < e.size; ++i) params_[e.offset + i] = static_cast<Scalar>(dist(rng));
  }
}

template <typename Scalar>
void Network<Scalar>::check_observation(const Observation& obs) const {
  const std::size_t expected =
      static_cast<std::size_t>(spec_.input_channels) * kViewSize * kViewSize;
  if (obs.channels() != spec_.input_channels || obs.values.size() != expected) {
    throw ContractViolation("observation has " + std::to_string(obs.channels()) +
                            " channel(s), network expects " +
                            std::to_string(spec_.input_channels));
  }
}

template <typename Scalar>
void Network<Scalar>::tower_forward(std::span<const Observation* const> obs,
                                    TowerCache& cache) const {
  const Views<Scalar, const Scalar*> w(layout_, params_.data());
  const int steps = static_cast<int>(obs.size());
  const int ch = spec_.input_channels;
  const int k1 = spec_.conv1_filters;
  const int k2 = spec_.conv2_filters;
  cache.steps = steps;

  cache.p1.resize(kP1 * steps, kK * kK * ch);
  for (int t = 0; t < steps; ++t) {
    check_observation(*obs[t]);
    for (int c = 0; c < ch; ++c) {
      for (int ky = 0; ky < kK; ++ky) {
        for (int kx = 0; kx < kK; ++kx) {
          const int col = (c * kK + ky) * kK + kx;
          for (int oy = 0; oy < kS1; ++oy) {
            for (int ox = 0; ox < kS1; ++ox) {
              cache.p1(t * kP1 + oy * kS1 + ox, col) =
                  static_cast<Scalar>(obs[t]->at(c, oy + ky, ox + kx));
            }
          }
        }
      }
    }
  }
  cache.a1.noalias() = cache.p1 * w.conv1_w;
  cache.a1.rowwise() += w.conv1_b.transpose();
  cache.a1 = cache.a1.cwiseMax(Scalar(0));

  cache.p2.resize(kP2 * steps, kK * kK * k1);
  for (int t = 0; t < steps; ++t) {
    for (int k = 0; k < k1; ++k) {
      for (int ky = 0; ky < kK; ++ky) {
        for (int kx = 0; kx < kK; ++kx) {
          const int col = (k * kK + ky) * kK + kx;
          for (int oy = 0; oy < kS2; ++oy) {
            for (int ox = 0; ox < kS2; ++ox) {
              cache.p2(t * kP2 + oy * kS2 + ox, col) =
                  cache.a1(t * kP1 + (oy + ky) * kS1 + ox + kx, k);
            }
          }
        }
      }
    }
  }
  cache.a2.noalias() = cache.p2 * w.conv2_w;
  cache.a2.rowwise() += w.conv2_b.transpose();
  cache.a2 = cache.a2.cwiseMax(Scalar(0));

  cache.flat.resize(spec_.flat_size(), steps);
  for (int t = 0; t < steps; ++t) {
    for (int k = 0; k < k2; ++k) {
      cache.flat.col(t).segment(k * kP2, kP2) = cache.a2.col(k).segment(t * kP2, kP2);
    }
  }
  if (steps == 1) {
    // Single-step acting: the dense layer is bandwidth bound and most
    // post-ReLU conv activations are zero, so only touch the live columns.
    cache.a3.resize(spec_.dense_units, 1);
    cache.a3.col(0) = w.dense_b;
    for (int j = 0; j < spec_.flat_size(); ++j) {
      const Scalar v = cache.flat(j, 0);
      if (v != Scalar(0)) cache.a3.col(0).noalias() += v * w.dense_w.col(j);
    }
  } else {
    cache.a3.noalias() = w.dense_w * cache.flat;
    cache.a3.colwise() += w.dense_b;
  }
  cache.a3 = cache.a3.cwiseMax(Scalar(0));
}

namespace {

template <typename Scalar>
void fill_lstm_input(Eigen::Ref<Vector<Scalar>> x, const Eigen::Ref<const Vector<Scalar>>& tower,
                     int prev_action, double prev_reward) {
  const int d = static_cast<int>(tower.size());
  x.head(d) = tower;
  x.segment(d, kNumActions).setZero();
  if (prev_action >= 0) {
    if (prev_action >= kNumActions) throw ContractViolation("previous action out of range");
    x(d + prev_action) = Scalar(1);
  }
  x(d + kNumActions) = static_cast<Scalar>(prev_reward);
}

// Numerically stable log-softmax.
template <typename Scalar>
Vector<Scalar> log_softmax(const Vector<Scalar>& logits) {
  const Scalar m = logits.maxCoeff();
  const Scalar lse = m + std::log((logits.array() - m).exp().sum());
  return logits.array() - lse;
}

}  // namespace

template <typename Scalar>
ForwardResult<Scalar> Network<Scalar>::forward(const Observation& obs, int prev_action,
                                               double prev_reward,
                                               const RecurrentState<Scalar>& state) const {
  const int l = spec_.lstm_units;
  if (state.h.size() != l || state.c.size() != l) {
    throw ContractViolation("recurrent state size does not match the LSTM width");
  }
  const Views<Scalar, const Scalar*> w(layout_, params_.data());
  TowerCache cache;
  const Observation* one[] = {&obs};
  tower_forward(one, cache);

  Vector<Scalar> x(spec_.lstm_input_size());
  fill_lstm_input<Scalar>(x, cache.a3.col(0), prev_action, prev_reward);

  Vector<Scalar> gates = w.lstm_b;
  gates.noalias() += w.lstm_wx * x;
  gates.noalias() += w.lstm_wh * state.h;

  ForwardResult<Scalar> out;
  out.state.c.resize(l);
  out.state.h.resize(l);
  for (int u = 0; u < l; ++u) {
    const Scalar i = sigmoid(gates(u));
    const Scalar f = sigmoid(gates(l + u));
    const Scalar g = std::tanh(gates(2 * l + u));
    const Scalar o = sigmoid(gates(3 * l + u));
    out.state.c(u) = f * state.c(u) + i * g;
    out.state.h(u) = o * std::tanh(out.state.c(u));
  }

  Vector<Scalar> logits = w.policy_b;
  logits.noalias() += w.policy_w * out.state.h;
  const Vector<Scalar> logp = log_softmax(logits);
  for (int a = 0; a < kNumActions; ++a) out.policy[a] = std::exp(logp(a));
  out.value = w.value_b(0) + w.value_w.row(0).dot(out.state.h);
  return out;
}

template <typename Scalar>
LossResult<Scalar> Network<Scalar>::loss_and_grads(const Segment<Scalar>& segment,
                                                   std::span<const double> returns,
                                                   const LossWeights& weights,
                                                   bool with_grads,
                                                   std::span<const double> fixed_advantages) const {
  const int steps = static_cast<int>(segment.steps.size());
  if (steps == 0) throw ContractViolation("empty segment");
  if (static_cast<int>(returns.size()) != steps) {
    throw ContractViolation("segment has " + std::to_string(steps) + " steps but " +
                            std::to_string(returns.size()) + " returns");
  }
  if (!fixed_advantages.empty() && static_cast<int>(fixed_advantages.size()) != steps) {
    throw ContractViolation("fixed advantages do not match the segment length");
  }
  const int l = spec_.lstm_units;
  const int d = spec_.dense_units;
  if (segment.initial_state.h.size() != l || segment.initial_state.c.size() != l) {
    throw ContractViolation("initial recurrent state size does not match the LSTM width");
  }
  for (const Transition& tr : segment.steps) {
    if (tr.situation != segment.situation) {
      throw ContractViolation("segment mixes situations");
    }
    if (tr.action < 0 || tr.action >= kNumActions) throw ContractViolation("action out of range");
  }

  const Views<Scalar, const Scalar*> w(layout_, params_.data());
  const Scalar beta = static_cast<Scalar>(weights.entropy_beta);
  const Scalar value_weight = static_cast<Scalar>(weights.value_weight);

  // Tower over the whole segment at once.
  TowerCache cache;
  std::vector<const Observation*> obs(steps);
  for (int t = 0; t < steps; ++t) obs[t] = &segment.steps[t].obs;
  tower_forward(obs, cache);

  Matrix<Scalar> x(spec_.lstm_input_size(), steps);
  for (int t = 0; t < steps; ++t) {
    fill_lstm_input<Scalar>(x.col(t), cache.a3.col(t), segment.steps[t].prev_action,
                            segment.steps[t].prev_reward);
  }
  Matrix<Scalar> gx = w.lstm_wx * x;
  gx.colwise() += w.lstm_b;

  Matrix<Scalar> gi(l, steps), gf(l, steps), gg(l, steps), go(l, steps);
  Matrix<Scalar> c_prev(l, steps), c_tanh(l, steps), h_prev(l, steps), h(l, steps);
  Vector<Scalar> hc = segment.initial_state.h;
  Vector<Scalar> cc = segment.initial_state.c;
  Vector<Scalar> gates(4 * l);
  for (int t = 0; t < steps; ++t) {
    h_prev.col(t) = hc;
    c_prev.col(t) = cc;
    gates = gx.col(t);
    gates.noalias() += w.lstm_wh * hc;
    for (int u = 0; u < l; ++u) {
      gi(u, t) = sigmoid(gates(u));
      gf(u, t) = sigmoid(gates(l + u));
      gg(u, t) = std::tanh(gates(2 * l + u));
      go(u, t) = sigmoid(gates(3 * l + u));
      cc(u) = gf(u, t) * cc(u) + gi(u, t) * gg(u, t);
      c_tanh(u, t) = std::tanh(cc(u));
      hc(u) = go(u, t) * c_tanh(u, t);
    }
    h.col(t) = hc;
  }

  Matrix<Scalar> logits = w.policy_w * h;
  logits.colwise() += w.policy_b;
  Matrix<Scalar> values = w.value_w * h;
  values.array() += w.value_b(0);

  LossResult<Scalar> result;
  Matrix<Scalar> d_logits(kNumActions, steps);
  Matrix<Scalar> d_values(1, steps);
  for (int t = 0; t < steps; ++t) {
    const Vector<Scalar> logp = log_softmax<Scalar>(logits.col(t));
    const Vector<Scalar> p = logp.array().exp();
    const Scalar entropy = -(p.array() * logp.array()).sum();
    const Scalar ret = static_cast<Scalar>(returns[t]);
    const Scalar advantage = ret - values(0, t);
    const int a = segment.steps[t].action;

    const Scalar policy_weight =
        fixed_advantages.empty() ? advantage : static_cast<Scalar>(fixed_advantages[t]);
    result.advantages.push_back(static_cast<double>(advantage));

    result.policy_loss += -logp(a) * policy_weight;
    result.value_loss += value_weight * advantage * advantage;
    result.entropy += entropy;

    for (int k = 0; k < kNumActions; ++k) {
      const Scalar indicator = k == a ? Scalar(1) : Scalar(0);
      d_logits(k, t) = -advantage * (indicator - p(k)) + beta * p(k) * (logp(k) + entropy);
    }
    d_values(0, t) = -Scalar(2) * value_weight * advantage;
  }
  result.loss = result.policy_loss - beta * result.entropy + result.value_loss;
  if (!with_grads) return result;

  result.grads = Vector<Scalar>::Zero(layout_.total_size());
  Views<Scalar, Scalar*> g(layout_, result.grads.data());

  g.policy_w.noalias() = d_logits * h.transpose();
  g.policy_b = d_logits.rowwise().sum();
  g.value_w.noalias() = d_values * h.transpose();
  g.value_b(0) = d_values.sum();

  Matrix<Scalar> dh_out = w.policy_w.transpose() * d_logits;
  dh_out.noalias() += w.value_w.transpose() * d_values;

  // Backpropagation through time, truncated at the segment start.
  Matrix<Scalar> dz(4 * l, steps);
  Vector<Scalar> dh_next = Vector<Scalar>::Zero(l);
  Vector<Scalar> dc_next = Vector<Scalar>::Zero(l);
  for (int t = steps - 1; t >= 0; --t) {
    for (int u = 0; u < l; ++u) {
      const Scalar dh = dh_out(u, t) + dh_next(u);
      const Scalar i = gi(u, t), f = gf(u, t), gv = gg(u, t), o = go(u, t);
      const Scalar tc = c_tanh(u, t);
      const Scalar d_o = dh * tc;
      const Scalar dc = dh * o * (Scalar(1) - tc * tc) + dc_next(u);
      dz(u, t) = dc * gv * i * (Scalar(1) - i);
      dz(l + u, t) = dc * c_prev(u, t) * f * (Scalar(1) - f);
      dz(2 * l + u, t) = dc * i * (Scalar(1) - gv * gv);
      dz(3 * l + u, t) = d_o * o * (Scalar(1) - o);
      dc_next(u) = dc * f;
    }
    dh_next.noalias() = w.lstm_wh.transpose() * dz.col(t);
  }
  g.lstm_wx.noalias() = dz * x.transpose();
  g.lstm_wh.noalias() = dz * h_prev.transpose();
  g.lstm_b = dz.rowwise().sum();

  const Matrix<Scalar> dx = w.lstm_wx.topLeftCorner(4 * l, d).transpose() * dz;
  const Matrix<Scalar> dz3 = (cache.a3.array() > Scalar(0)).select(dx, Scalar(0));
  g.dense_w.noalias() = dz3 * cache.flat.transpose();
  g.dense_b = dz3.rowwise().sum();
  const Matrix<Scalar> dflat = w.dense_w.transpose() * dz3;

  const int k1 = spec_.conv1_filters;
  const int k2 = spec_.conv2_filters;
  Matrix<Scalar> dout2(kP2 * steps, k2);
  for (int t = 0; t < steps; ++t) {
    for (int k = 0; k < k2; ++k) {
      dout2.col(k).segment(t * kP2, kP2) = dflat.col(t).segment(k * kP2, kP2);
    }
  }
  dout2 = (cache.a2.array() > Scalar(0)).select(dout2, Scalar(0));
  g.conv2_w.noalias() = cache.p2.transpose() * dout2;
  g.conv2_b = dout2.colwise().sum().transpose();

  const Matrix<Scalar> dp2 = dout2 * w.conv2_w.transpose();
  Matrix<Scalar> da1 = Matrix<Scalar>::Zero(kP1 * steps, k1);
  for (int t = 0; t < steps; ++t) {
    for (int k = 0; k < k1; ++k) {
      for (int ky = 0; ky < kK; ++ky) {
        for (int kx = 0; kx < kK; ++kx) {
          const int col = (k * kK + ky) * kK + kx;
          for (int oy = 0; oy < kS2; ++oy) {
            for (int ox = 0; ox < kS2; ++ox) {
              da1(t * kP1 + (oy + ky) * kS1 + ox + kx, k) += dp2(t * kP2 + oy * kS2 + ox, col);
            }
          }
        }
      }
    }
  }
  const Matrix<Scalar> dout1 = (cache.a1.array() > Scalar(0)).select(da1, Scalar(0));
  g.conv1_w.noalias() = cache.p1.transpose() * dout1;
  g.conv1_b = dout1.colwise().sum().transpose();
  return result;
}

template class Network<float>;
template class Network<double>;

}  // namespace pa3c
