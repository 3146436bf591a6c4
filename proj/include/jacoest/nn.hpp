#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jacoest/jacobian.hpp"

namespace jacoest {

enum class Activation { Tanh, Identity };

std::string to_string(Activation a);
Activation parse_activation(const std::string& text);

struct NetworkArch {
  std::vector<int> layer_sizes{14, 50, 50, 50, 14};
  Activation hidden = Activation::Tanh;
  Activation output = Activation::Identity;
};

/// Fully connected net; weights[l] maps layer l to layer l + 1.
/// Inputs are standardized as (x - in_mean) / in_scale before the first
/// layer and outputs mapped back as out * out_scale + out_mean.
struct TrainedNetwork {
  NetworkArch arch;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  Vector in_mean;
  Vector in_scale;
  Vector out_mean;
  Vector out_scale;

  int input_dim() const { return arch.layer_sizes.front(); }
  int output_dim() const { return arch.layer_sizes.back(); }
};

/// 1-based inclusive sample interval.
struct SampleRange {
  int first = 1;
  int last = 1;

  int size() const { return last - first + 1; }
};

struct TrainSettings {
  SampleRange train_range{1, 8400};
  SampleRange test_range{8401, 9600};
  int epochs = 2000;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  /// Test loss is recorded every this many epochs (and at the last one).
  int log_every = 10;
};

struct TrainResult {
  TrainedNetwork net;
  std::vector<double> train_loss;  // per epoch, standardized MSE before the update
  std::vector<std::pair<int, double>> test_loss;
};

/// Randomly initialized net: weights and biases uniform in +-1/sqrt(fan_in),
/// identity standardization.
TrainedNetwork init_network(const NetworkArch& arch, std::uint64_t seed);

/// Full-batch Adam on mean squared error in standardized units. x and y hold
/// one sample per column. Throws TrainingDiverged on a non-finite loss.
TrainResult train_network(const Matrix& x, const Matrix& y, const NetworkArch& arch,
                          const TrainSettings& settings);

Vector predict(const TrainedNetwork& net, const Vector& x);
/// Columnwise prediction.
Matrix predict_batch(const TrainedNetwork& net, const Matrix& x);

/// dy/dx = diag(out_scale) W_L D_{L-1} W_{L-1} ... D_1 W_1 diag(1 / in_scale),
/// with D_l the activation derivatives on the forward pass at x.
Matrix network_jacobian(const TrainedNetwork& net, const Vector& x);

std::string network_to_json(const TrainedNetwork& net);
TrainedNetwork network_from_json(const std::string& text);

}  // namespace jacoest
