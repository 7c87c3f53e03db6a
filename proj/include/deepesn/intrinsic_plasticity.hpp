#pragma once

#include <cmath>
#include <vector>

#include "deepesn/core.hpp"
#include "deepesn/reservoir.hpp"

namespace deepesn {

/// Gaussian-target intrinsic plasticity for tanh units.
struct IpConfig {
  double target_std = 0.1;
  double target_mean = 0.0;
  double learning_rate = 1e-3;
  int epochs = 5;

  void validate() const {
    require(target_std > 0.0, "IpConfig: target_std must be positive");
    require(learning_rate >= 0.0, "IpConfig: learning_rate must be nonnegative");
    require(epochs >= 0, "IpConfig: epochs must be nonnegative");
  }
};

/// Smallest gain an update may leave behind.
inline constexpr double kMinIpGain = 1e-6;

template <typename Scalar>
struct IpParameters {
  Vector<Scalar> gain;
  Vector<Scalar> bias;
  /// Units whose gain went non-positive and was clamped to kMinIpGain.
  Index clamped = 0;
};

/// In-place Gaussian-IP step. `net` is the pre-activation before gain and
/// bias and `y` = tanh(gain .* net + bias). Returns the number of clamped
/// gains.
///
///   db = -eta * (-mu/s^2 + (y/s^2) (2 s^2 + 1 - y^2 + mu y))
///   dg = eta / g + db .* net
template <typename Scalar>
Index ip_update_in_place(const Vector<Scalar>& net, const Vector<Scalar>& y, Vector<Scalar>& gain,
                         Vector<Scalar>& bias, const IpConfig& cfg) {
  const Index n = net.size();
  require(y.size() == n && gain.size() == n && bias.size() == n, "ip_update: dimension mismatch");
  require(net.allFinite() && y.allFinite() && gain.allFinite() && bias.allFinite(),
          "ip_update: non-finite input");

  const auto eta = static_cast<Scalar>(cfg.learning_rate);
  const auto mu = static_cast<Scalar>(cfg.target_mean);
  const auto var = static_cast<Scalar>(cfg.target_std * cfg.target_std);
  const auto floor = static_cast<Scalar>(kMinIpGain);
  Index clamped = 0;
  for (Index i = 0; i < n; ++i) {
    require(gain[i] > Scalar(0), "ip_update: gain must be positive");
    const Scalar yi = y[i];
    const Scalar db = -eta * (-mu / var + (yi / var) * (Scalar(2) * var + Scalar(1) - yi * yi + mu * yi));
    const Scalar dg = eta / gain[i] + db * net[i];
    bias[i] += db;
    gain[i] += dg;
    if (!(gain[i] > Scalar(0))) {
      gain[i] = floor;
      ++clamped;
    }
  }
  return clamped;
}

template <typename Scalar>
IpParameters<Scalar> ip_update(const Vector<Scalar>& net, const Vector<Scalar>& y, const Vector<Scalar>& gain,
                               const Vector<Scalar>& bias, const IpConfig& cfg) {
  IpParameters<Scalar> out{gain, bias, 0};
  out.clamped = ip_update_in_place(net, y, out.gain, out.bias, cfg);
  return out;
}

struct IpSummary {
  Index steps = 0;
  Index clamped = 0;
};

/// Online IP pre-training. For each epoch the sequences are visited in the
/// given order, each from the zero state; at every step all layers advance
/// and then adapt their gain and bias from their own pre-activation.
/// Weight matrices are never touched.
template <typename Scalar, typename SequenceMatrix>
IpSummary pretrain_ip(DeepReservoir<Scalar>& model, const std::vector<SequenceMatrix>& sequences,
                      const IpConfig& cfg) {
  cfg.validate();
  model.check_structure();
  require(!sequences.empty(), "pretrain_ip: no training sequences");

  IpSummary summary;
  std::vector<LayerWorkspace<Scalar>> ws(model.layers.size());
  Vector<Scalar> u(model.input_dim());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& seq : sequences) {
      require(seq.cols() == model.input_dim(), "pretrain_ip: input dimension mismatch");
      auto state = DeepReservoirState<Scalar>::zeros(model);
      for (Index t = 0; t < seq.rows(); ++t) {
        u = seq.row(t).transpose().template cast<Scalar>();
        for (Index l = 0; l < model.n_layers(); ++l) {
          auto& layer = model.layers[l];
          if (l == 0)
            advance_layer(layer, u, state.layers[0], ws[0]);
          else
            advance_layer(layer, state.layers[l - 1], state.layers[l], ws[l]);
          summary.clamped += ip_update_in_place(ws[l].net, ws[l].activation, layer.ip_gain, layer.ip_bias, cfg);
        }
        ++summary.steps;
      }
    }
  }
  return summary;
}

}  // namespace deepesn
