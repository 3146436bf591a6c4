#include "jacoest/nn.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "jacoest/errors.hpp"
#include "jacoest/random.hpp"

namespace jacoest {

std::string to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "identity"; }

Activation parse_activation(const std::string& text) {
  if (text == "tanh") return Activation::Tanh;
  if (text == "identity" || text == "linear") return Activation::Identity;
  throw ConfigError("unknown activation '" + text + "'");
}

namespace {

void check_arch(const NetworkArch& arch) {
  if (arch.layer_sizes.size() < 2) throw ConfigError("network needs at least two layers");
  for (int s : arch.layer_sizes)
    if (s < 1) throw ConfigError("layer sizes must be positive");
}

Activation layer_activation(const NetworkArch& arch, std::size_t l) {
  return l + 1 == arch.layer_sizes.size() - 1 ? arch.output : arch.hidden;
}

void activate(Matrix& z, Activation a) {
  if (a == Activation::Tanh) z = z.array().tanh();
}

// Derivative given the activated values.
Matrix activation_slope(const Matrix& out, Activation a) {
  if (a == Activation::Tanh) return (1.0 - out.array().square()).matrix();
  return Matrix::Ones(out.rows(), out.cols());
}

std::vector<Matrix> forward(const TrainedNetwork& net, const Matrix& z0) {
  std::vector<Matrix> acts{z0};
  acts.reserve(net.weights.size() + 1);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    Matrix z = net.weights[l] * acts.back();
    z.colwise() += net.biases[l];
    activate(z, layer_activation(net.arch, l));
    acts.push_back(std::move(z));
  }
  return acts;
}

void standardize_rows(const Matrix& m, Vector& mean, Vector& scale) {
  const double count = static_cast<double>(m.cols());
  mean = m.rowwise().mean();
  scale = Vector::Ones(m.rows());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double var = (m.row(r).array() - mean(r)).square().sum() / count;
    if (var > 0.0) scale(r) = std::sqrt(var);
  }
}

struct AdamState {
  std::vector<Matrix> mw, vw;
  std::vector<Vector> mb, vb;
};

}  // namespace

TrainedNetwork init_network(const NetworkArch& arch, std::uint64_t seed) {
  check_arch(arch);
  TrainedNetwork net;
  net.arch = arch;
  Rng rng(mix_seed(seed, 0x6e6e));
  for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
    const int fan_in = arch.layer_sizes[l], fan_out = arch.layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Matrix w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-bound, bound);
    Vector b(fan_out);
    for (int r = 0; r < fan_out; ++r) b(r) = rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  net.in_mean = Vector::Zero(arch.layer_sizes.front());
  net.in_scale = Vector::Ones(arch.layer_sizes.front());
  net.out_mean = Vector::Zero(arch.layer_sizes.back());
  net.out_scale = Vector::Ones(arch.layer_sizes.back());
  return net;
}

TrainResult train_network(const Matrix& x, const Matrix& y, const NetworkArch& arch,
                          const TrainSettings& settings) {
  check_arch(arch);
  if (x.cols() == 0 || x.cols() != y.cols()) throw DimensionError("dataset is empty or ragged");
  if (x.rows() != arch.layer_sizes.front() || y.rows() != arch.layer_sizes.back())
    throw DimensionError("dataset dimensions do not match the architecture");
  const auto& tr = settings.train_range;
  const auto& te = settings.test_range;
  const int total = static_cast<int>(x.cols());
  if (tr.first < 1 || tr.last > total || tr.size() < 1)
    throw ConfigError("training range is outside the dataset");
  if (te.size() > 0 && (te.first < 1 || te.last > total))
    throw ConfigError("test range is outside the dataset");
  if (te.size() > 0 && !(te.last < tr.first || te.first > tr.last))
    throw ConfigError("training and test ranges overlap");
  if (settings.epochs < 1 || !(settings.learning_rate > 0.0))
    throw ConfigError("training needs epochs >= 1 and a positive learning rate");

  TrainResult res;
  TrainedNetwork& net = res.net;
  net = init_network(arch, settings.seed);
  const Matrix xtr = x.middleCols(tr.first - 1, tr.size());
  const Matrix ytr = y.middleCols(tr.first - 1, tr.size());
  standardize_rows(xtr, net.in_mean, net.in_scale);
  standardize_rows(ytr, net.out_mean, net.out_scale);
  auto to_z = [&](const Matrix& m, const Vector& mean, const Vector& scale) {
    return Matrix((m.colwise() - mean).array().colwise() / scale.array());
  };
  const Matrix zx = to_z(xtr, net.in_mean, net.in_scale);
  const Matrix zy = to_z(ytr, net.out_mean, net.out_scale);
  Matrix zx_test, zy_test;
  if (te.size() > 0) {
    zx_test = to_z(x.middleCols(te.first - 1, te.size()), net.in_mean, net.in_scale);
    zy_test = to_z(y.middleCols(te.first - 1, te.size()), net.out_mean, net.out_scale);
  }

  const std::size_t layers = net.weights.size();
  AdamState st;
  for (std::size_t l = 0; l < layers; ++l) {
    st.mw.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    st.vw.push_back(st.mw.back());
    st.mb.push_back(Vector::Zero(net.biases[l].size()));
    st.vb.push_back(st.mb.back());
  }
  const double count = static_cast<double>(zx.cols()) * static_cast<double>(zy.rows());
  double b1t = 1.0, b2t = 1.0;
  for (int epoch = 1; epoch <= settings.epochs; ++epoch) {
    const auto acts = forward(net, zx);
    Matrix delta = acts.back() - zy;
    const double loss = delta.squaredNorm() / count;
    if (!std::isfinite(loss)) throw TrainingDiverged(epoch, loss);
    res.train_loss.push_back(loss);

    // dL/d(output) for the mean over all entries.
    delta *= 2.0 / count;
    b1t *= settings.beta1;
    b2t *= settings.beta2;
    const double lr_t = settings.learning_rate * std::sqrt(1.0 - b2t) / (1.0 - b1t);
    for (std::size_t li = layers; li-- > 0;) {
      delta.array() *= activation_slope(acts[li + 1], layer_activation(net.arch, li)).array();
      const Matrix gw = delta * acts[li].transpose();
      const Vector gb = delta.rowwise().sum();
      if (li > 0) delta = net.weights[li].transpose() * delta;
      st.mw[li] = settings.beta1 * st.mw[li] + (1.0 - settings.beta1) * gw;
      st.vw[li] = settings.beta2 * st.vw[li] + (1.0 - settings.beta2) * gw.cwiseAbs2();
      st.mb[li] = settings.beta1 * st.mb[li] + (1.0 - settings.beta1) * gb;
      st.vb[li] = settings.beta2 * st.vb[li] + (1.0 - settings.beta2) * gb.cwiseAbs2();
      const double eps_hat = settings.adam_eps * std::sqrt(1.0 - b2t);
      net.weights[li].array() -= lr_t * st.mw[li].array() / (st.vw[li].array().sqrt() + eps_hat);
      net.biases[li].array() -= lr_t * st.mb[li].array() / (st.vb[li].array().sqrt() + eps_hat);
    }

    if (te.size() > 0 && (epoch % std::max(settings.log_every, 1) == 0 || epoch == settings.epochs)) {
      const auto test_acts = forward(net, zx_test);
      const double tl = (test_acts.back() - zy_test).squaredNorm() /
                        (static_cast<double>(zx_test.cols()) * static_cast<double>(zy_test.rows()));
      res.test_loss.emplace_back(epoch, tl);
    }
  }
  return res;
}

Matrix predict_batch(const TrainedNetwork& net, const Matrix& x) {
  if (x.rows() != net.input_dim()) throw DimensionError("input has the wrong dimension");
  const Matrix z = (x.colwise() - net.in_mean).array().colwise() / net.in_scale.array();
  const auto acts = forward(net, z);
  return (acts.back().array().colwise() * net.out_scale.array()).matrix().colwise() + net.out_mean;
}

Vector predict(const TrainedNetwork& net, const Vector& x) { return predict_batch(net, x); }

Matrix network_jacobian(const TrainedNetwork& net, const Vector& x) {
  if (x.size() != net.input_dim()) throw DimensionError("input has the wrong dimension");
  const Vector z = (x - net.in_mean).cwiseQuotient(net.in_scale);
  const auto acts = forward(net, z);
  Matrix j = net.in_scale.cwiseInverse().asDiagonal();
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const Vector slope = activation_slope(acts[l + 1], layer_activation(net.arch, l));
    j = slope.asDiagonal() * (net.weights[l] * j);
  }
  return net.out_scale.asDiagonal() * j;
}

namespace {

using nlohmann::json;

json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector json_vec(const json& j, Eigen::Index expect, const char* what) {
  const auto values = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != expect)
    throw ConfigError(std::string("network file: wrong length for ") + what);
  return Eigen::Map<const Vector>(values.data(), expect);
}

}  // namespace

std::string network_to_json(const TrainedNetwork& net) {
  json doc;
  doc["format"] = "jacoest-network";
  doc["version"] = 1;
  doc["layer_sizes"] = net.arch.layer_sizes;
  doc["hidden_activation"] = to_string(net.arch.hidden);
  doc["output_activation"] = to_string(net.arch.output);
  doc["weights"] = json::array();
  doc["biases"] = json::array();
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = net.weights[l];
    doc["weights"].push_back(std::vector<double>(rm.data(), rm.data() + rm.size()));
    doc["biases"].push_back(vec_json(net.biases[l]));
  }
  doc["input_mean"] = vec_json(net.in_mean);
  doc["input_scale"] = vec_json(net.in_scale);
  doc["output_mean"] = vec_json(net.out_mean);
  doc["output_scale"] = vec_json(net.out_scale);
  return doc.dump(1);
}

TrainedNetwork network_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.value("format", "") != "jacoest-network" || doc.value("version", 0) != 1)
      throw ConfigError("not a version 1 network file");
    NetworkArch arch;
    arch.layer_sizes = doc.at("layer_sizes").get<std::vector<int>>();
    arch.hidden = parse_activation(doc.at("hidden_activation").get<std::string>());
    arch.output = parse_activation(doc.at("output_activation").get<std::string>());
    check_arch(arch);
    TrainedNetwork net;
    net.arch = arch;
    const auto& ws = doc.at("weights");
    const auto& bs = doc.at("biases");
    if (ws.size() + 1 != arch.layer_sizes.size() || bs.size() != ws.size())
      throw ConfigError("network file: layer count mismatch");
    for (std::size_t l = 0; l < ws.size(); ++l) {
      const int rows = arch.layer_sizes[l + 1], cols = arch.layer_sizes[l];
      const auto flat = ws[l].get<std::vector<double>>();
      if (flat.size() != static_cast<std::size_t>(rows) * cols)
        throw ConfigError("network file: wrong weight count");
      net.weights.push_back(
          Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
              flat.data(), rows, cols));
      net.biases.push_back(json_vec(bs[l], rows, "bias"));
    }
    net.in_mean = json_vec(doc.at("input_mean"), net.input_dim(), "input_mean");
    net.in_scale = json_vec(doc.at("input_scale"), net.input_dim(), "input_scale");
    net.out_mean = json_vec(doc.at("output_mean"), net.output_dim(), "output_mean");
    net.out_scale = json_vec(doc.at("output_scale"), net.output_dim(), "output_scale");
    return net;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("network file: ") + e.what());
  }
}

}  // namespace jacoest
