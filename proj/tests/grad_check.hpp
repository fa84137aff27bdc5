#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <random>

#include "fixtures.hpp"
#include "oracles/oracles.hpp"
#include "pa3c/network.hpp"
#include "pa3c/observation.hpp"

namespace pa3c::testing {

inline NetworkSpec shrunk_spec(Encoding encoding) {
  NetworkSpec s;
  s.input_channels = channels(encoding);
  s.conv1_filters = 2;
  s.conv2_filters = 2;
  s.dense_units = 8;
  s.lstm_units = 8;
  return s;
}

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t params = 0;
};

// Smallest |pre-activation| over every ReLU in the tower, recomputed with
// plain loops. Central differences only see the gradient when no unit
// crosses zero inside the probe step.
inline double relu_margin(const Network<double>& net, const std::vector<const Observation*>& obs) {
  const NetworkSpec& s = net.spec();
  const ParamLayout& layout = net.layout();
  auto w = [&](const char* name, int r, int c) {
    const ParamEntry& e = layout.find(name);
    return net.params()[e.offset + static_cast<std::size_t>(c) * e.shape[0] + r];
  };
  auto b = [&](const char* name, int i) { return net.params()[layout.find(name).offset + i]; };
  const int n1 = NetworkSpec::kConv1Size, n2 = NetworkSpec::kConv2Size;
  double margin = std::numeric_limits<double>::infinity();
  for (const Observation* o : obs) {
    std::vector<double> a1(static_cast<std::size_t>(n1 * n1 * s.conv1_filters));
    for (int k = 0; k < s.conv1_filters; ++k)
      for (int y = 0; y < n1; ++y)
        for (int x = 0; x < n1; ++x) {
          double z = b("conv1/b", k);
          for (int c = 0; c < s.input_channels; ++c)
            for (int ky = 0; ky < 3; ++ky)
              for (int kx = 0; kx < 3; ++kx) z += o->at(c, y + ky, x + kx) * w("conv1/w", (c * 3 + ky) * 3 + kx, k);
          margin = std::min(margin, std::abs(z));
          a1[(k * n1 + y) * n1 + x] = std::max(z, 0.0);
        }
    std::vector<double> flat(static_cast<std::size_t>(s.flat_size()));
    for (int k = 0; k < s.conv2_filters; ++k)
      for (int y = 0; y < n2; ++y)
        for (int x = 0; x < n2; ++x) {
          double z = b("conv2/b", k);
          for (int c = 0; c < s.conv1_filters; ++c)
            for (int ky = 0; ky < 3; ++ky)
              for (int kx = 0; kx < 3; ++kx)
                z += a1[(c * n1 + y + ky) * n1 + x + kx] * w("conv2/w", (c * 3 + ky) * 3 + kx, k);
          margin = std::min(margin, std::abs(z));
          flat[(k * n2 + y) * n2 + x] = std::max(z, 0.0);
        }
    for (int u = 0; u < s.dense_units; ++u) {
      double z = b("dense/b", u);
      for (int j = 0; j < s.flat_size(); ++j) z += flat[j] * w("dense/w", u, j);
      margin = std::min(margin, std::abs(z));
    }
  }
  return margin;
}

// One random draw: parameters (biases redrawn until every ReLU input is at
// least 1e-4 from its kink, ten finite-difference steps), a short segment of real observations, random returns and a
// random initial recurrent state. Compares analytic gradients with central
// differences of the same loss, with the advantage frozen at the drawn
// parameters as the analytic gradient assumes.
inline GradCheckResult gradient_check_draw(std::uint64_t seed, Encoding encoding, int steps = 4) {
  std::mt19937_64 rng(seed);
  Network<double> net(shrunk_spec(encoding));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  net.initialize(seed);
  const auto walk = random_walk(seed, 40);
  std::vector<Observation> views;
  for (int t = 0; t < steps; ++t) {
    views.push_back(crop_view(walk.history[std::min<std::size_t>(walk.history.size() - 1, 5 * t)], encoding));
  }
  std::vector<const Observation*> view_ptrs;
  for (const auto& v : views) view_ptrs.push_back(&v);
  for (int attempt = 0;; ++attempt) {
    if (attempt == 1000) throw std::runtime_error("no kink-free parameter draw");
    for (const ParamEntry& e : net.layout().entries()) {
      if (e.shape.size() == 1) {
        for (std::size_t i = 0; i < e.size; ++i) net.params()[e.offset + i] = 0.3 * unit(rng);
      }
    }
    if (relu_margin(net, view_ptrs) >= 1e-4) break;
  }

  Segment<double> seg;
  seg.situation = 4;
  const int l = net.spec().lstm_units;
  seg.initial_state.h = Vector<double>(l);
  seg.initial_state.c = Vector<double>(l);
  for (int u = 0; u < l; ++u) {
    seg.initial_state.h(u) = 0.5 * unit(rng);
    seg.initial_state.c(u) = unit(rng);
  }
  std::uniform_int_distribution<int> action(0, kNumActions - 1);
  std::vector<double> returns;
  for (int t = 0; t < steps; ++t) {
    Transition tr;
    tr.obs = views[t];
    tr.situation = 4;
    tr.prev_action = t == 0 ? kNoAction : action(rng);
    tr.prev_reward = t == 0 ? 0.0 : unit(rng);
    tr.action = action(rng);
    seg.steps.push_back(tr);
    returns.push_back(3.0 * unit(rng));
  }
  const LossWeights weights{0.001, 0.5};

  const LossResult<double> analytic = net.loss_and_grads(seg, returns, weights);
  std::vector<double> theta(net.params().data(), net.params().data() + net.params().size());
  auto loss = [&](const std::vector<double>& x) {
    Network<double> probe(net.spec());
    probe.params() = Eigen::Map<const Vector<double>>(x.data(), static_cast<Eigen::Index>(x.size()));
    return probe.loss_and_grads(seg, returns, weights, false, analytic.advantages).loss;
  };
  const std::vector<double> numeric = oracles::finite_difference_grads(loss, theta, 1e-5);

  GradCheckResult out;
  out.params = theta.size();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double a = analytic.grads(static_cast<Eigen::Index>(i));
    const double n = numeric[i];
    const double scale = std::max({std::abs(a), std::abs(n), 1e-6});
    out.max_rel_error = std::max(out.max_rel_error, std::abs(a - n) / scale);
  }
  return out;
}

}  // namespace pa3c::testing
