#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ilv/errors.hpp"
#include "ilv/interleaver.hpp"
#include "ilv/junction.hpp"
#include "ilv/rng.hpp"

namespace ilv {

struct TrainParams {
  double learning_rate = 1.0;
  std::uint32_t batch_size = 32;
  std::uint32_t epochs = 10;
};

struct NetworkConfig {
  std::vector<std::uint32_t> layer_sizes;
  std::vector<std::uint32_t> fan_outs;     // per junction
  std::vector<std::uint32_t> parallelism;  // per junction
  std::vector<VariantSet> variants;        // per junction
  std::uint64_t seed = 1;
  TrainParams train;

  std::size_t junction_count() const { return layer_sizes.empty() ? 0 : layer_sizes.size() - 1; }

  void validate() const {
    if (layer_sizes.size() < 2) throw ConfigError("network needs at least two layers");
    std::size_t j = junction_count();
    if (fan_outs.size() != j || parallelism.size() != j || variants.size() != j)
      throw ConfigError("per-junction parameter counts do not match layer count");
  }
};

struct LabeledSample {
  std::vector<double> input;
  std::uint32_t label = 0;
};

struct Dataset {
  std::vector<std::vector<double>> train_inputs;
  std::vector<std::uint32_t> train_labels;
  std::vector<std::vector<double>> val_inputs;
  std::vector<std::uint32_t> val_labels;
};

struct TrainResult {
  // Index 0 is the untrained network; entry e is after epoch e.
  std::vector<double> val_accuracy;
  // Entry 0 is the full-pass loss before training; entry e the mean batch
  // loss seen during epoch e.
  std::vector<double> train_loss;
};

// Edge-list MLP over interleaver-wired junctions: edge e of junction j joins
// left neuron floor(pi_w(e) / fo) to right neuron floor(e / fi). Hidden
// layers are ReLU, the output layer softmax.
class SparseNetwork {
 public:
  static SparseNetwork build(const NetworkConfig& config) {
    config.validate();
    SparseNetwork net;
    net.config_ = config;
    for (std::size_t j = 0; j < config.junction_count(); ++j) {
      JunctionConfig jc = JunctionConfig::create(config.layer_sizes[j],
                                                 config.layer_sizes[j + 1],
                                                 config.fan_outs[j], config.parallelism[j]);
      std::uint64_t jseed = derive_seed(config.seed, Stream::junction, j);
      InterleaverBuild build = InterleaverBuild::generate(jc, config.variants[j], jseed);
      Junction junction{jc, std::move(build), {}, {}};
      junction.edge_left.resize(jc.edge_count);
      for (std::uint64_t e = 0; e < jc.edge_count; ++e)
        junction.edge_left[e] = junction.build.left_neuron(e);
      junction.weights.resize(jc.edge_count);
      auto g = make_engine(config.seed, Stream::net_init, j);
      double bound = std::sqrt(6.0 / jc.fan_in);
      for (double& w : junction.weights) w = uniform_in(g, -bound, bound);
      net.junctions_.push_back(std::move(junction));
      net.biases_.emplace_back(config.layer_sizes[j + 1], 0.0);
    }
    net.acts_.resize(config.layer_sizes.size());
    net.preacts_.resize(config.layer_sizes.size());
    net.deltas_.resize(config.layer_sizes.size());
    for (std::size_t l = 0; l < config.layer_sizes.size(); ++l) {
      net.acts_[l].resize(config.layer_sizes[l]);
      net.preacts_[l].resize(config.layer_sizes[l]);
      net.deltas_[l].resize(config.layer_sizes[l]);
    }
    return net;
  }

  // Fraction of dense positions carrying an edge.
  double density() const {
    double edges = 0, dense = 0;
    for (const Junction& j : junctions_) {
      edges += static_cast<double>(j.config.edge_count);
      dense += static_cast<double>(j.config.left_neurons) * j.config.right_neurons;
    }
    return edges / dense;
  }

  // Class scores (softmax probabilities) for one input.
  const std::vector<double>& feedforward(const std::vector<double>& input) {
    if (input.size() != acts_[0].size())
      throw ConfigError("input size does not match first layer");
    acts_[0] = input;
    for (std::size_t j = 0; j < junctions_.size(); ++j) {
      const Junction& jn = junctions_[j];
      const std::uint32_t fi = jn.config.fan_in;
      std::vector<double>& pre = preacts_[j + 1];
      const std::vector<double>& act = acts_[j];
      for (std::uint32_t r = 0; r < jn.config.right_neurons; ++r) {
        double sum = biases_[j][r];
        std::uint64_t base = static_cast<std::uint64_t>(r) * fi;
        for (std::uint32_t q = 0; q < fi; ++q)
          sum += jn.weights[base + q] * act[jn.edge_left[base + q]];
        pre[r] = sum;
      }
      bool last = j + 1 == junctions_.size();
      std::vector<double>& out = acts_[j + 1];
      if (last) {
        softmax(pre, out);
      } else {
        for (std::size_t r = 0; r < pre.size(); ++r) out[r] = pre[r] > 0 ? pre[r] : 0.0;
      }
    }
    return acts_.back();
  }

  // Cross-entropy of the most recent feedforward, via log-sum-exp so a
  // diverging network yields inf/nan rather than a clamped value.
  double loss_of_last(std::uint32_t label) const {
    const std::vector<double>& pre = preacts_.back();
    double mx = pre[0];
    for (double v : pre) mx = v > mx ? v : mx;
    double sum = 0;
    for (double v : pre) sum += std::exp(v - mx);
    return std::log(sum) + mx - pre[label];
  }

  TrainResult train(const Dataset& data, const TrainParams& params) {
    TrainResult result;
    result.val_accuracy.push_back(evaluate(data.val_inputs, data.val_labels));
    result.train_loss.push_back(mean_loss(data.train_inputs, data.train_labels));
    std::vector<std::uint32_t> order(data.train_inputs.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    ensure_grad_buffers();
    for (std::uint32_t epoch = 1; epoch <= params.epochs; ++epoch) {
      auto g = make_engine(config_.seed, Stream::shuffle, epoch);
      shuffle_values(g, order);
      double epoch_loss = 0;
      std::uint64_t batches = 0;
      for (std::size_t at = 0; at < order.size(); at += params.batch_size) {
        std::size_t count = std::min<std::size_t>(params.batch_size, order.size() - at);
        zero_grads();
        double batch_loss = 0;
        for (std::size_t b = 0; b < count; ++b) {
          const std::uint32_t idx = order[at + b];
          feedforward(data.train_inputs[idx]);
          batch_loss += loss_of_last(data.train_labels[idx]);
          accumulate_gradients(data.train_labels[idx]);
        }
        batch_loss /= static_cast<double>(count);
        if (!std::isfinite(batch_loss))
          throw DivergenceError("training loss is not finite in epoch " + std::to_string(epoch),
                                epoch);
        apply_grads(params.learning_rate / static_cast<double>(count));
        epoch_loss += batch_loss;
        ++batches;
      }
      result.train_loss.push_back(batches ? epoch_loss / static_cast<double>(batches) : 0.0);
      result.val_accuracy.push_back(evaluate(data.val_inputs, data.val_labels));
    }
    return result;
  }

  double evaluate(const std::vector<std::vector<double>>& inputs,
                  const std::vector<std::uint32_t>& labels) {
    if (inputs.empty()) return 0.0;
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const std::vector<double>& scores = feedforward(inputs[i]);
      std::uint32_t best = 0;
      for (std::uint32_t c = 1; c < scores.size(); ++c)
        if (scores[c] > scores[best]) best = c;
      if (best == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(inputs.size());
  }

  double mean_loss(const std::vector<std::vector<double>>& inputs,
                   const std::vector<std::uint32_t>& labels) {
    double total = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      feedforward(inputs[i]);
      total += loss_of_last(labels[i]);
    }
    return inputs.empty() ? 0.0 : total / static_cast<double>(inputs.size());
  }

  // Largest relative disagreement between analytic and central-difference
  // gradients on one sample, across every weight and bias.
  double gradient_check(const LabeledSample& sample, double step = 1e-5) {
    ensure_grad_buffers();
    zero_grads();
    feedforward(sample.input);
    accumulate_gradients(sample.label);
    double worst = 0;
    auto probe = [&](double& theta, double analytic) {
      double keep = theta;
      theta = keep + step;
      feedforward(sample.input);
      double up = loss_of_last(sample.label);
      theta = keep - step;
      feedforward(sample.input);
      double down = loss_of_last(sample.label);
      theta = keep;
      double numeric = (up - down) / (2 * step);
      double scale = std::max({std::fabs(analytic), std::fabs(numeric), 1e-4});
      worst = std::max(worst, std::fabs(analytic - numeric) / scale);
    };
    for (std::size_t j = 0; j < junctions_.size(); ++j) {
      for (std::uint64_t e = 0; e < junctions_[j].weights.size(); ++e)
        probe(junctions_[j].weights[e], weight_grads_[j][e]);
      for (std::size_t r = 0; r < biases_[j].size(); ++r)
        probe(biases_[j][r], bias_grads_[j][r]);
    }
    return worst;
  }

  struct Junction {
    JunctionConfig config;
    InterleaverBuild build;
    std::vector<std::uint32_t> edge_left;
    std::vector<double> weights;
  };

  const std::vector<Junction>& junctions() const { return junctions_; }
  std::vector<Junction>& junctions() { return junctions_; }
  const NetworkConfig& config() const { return config_; }
  const std::vector<double>& activations(std::size_t layer) const { return acts_[layer]; }
  const std::vector<double>& preactivations(std::size_t layer) const { return preacts_[layer]; }
  std::vector<std::vector<double>>& biases() { return biases_; }

 private:
  static void softmax(const std::vector<double>& pre, std::vector<double>& out) {
    double mx = pre[0];
    for (double v : pre) mx = v > mx ? v : mx;
    double sum = 0;
    for (std::size_t i = 0; i < pre.size(); ++i) {
      out[i] = std::exp(pre[i] - mx);
      sum += out[i];
    }
    for (double& v : out) v /= sum;
  }

  void ensure_grad_buffers() {
    if (!weight_grads_.empty()) return;
    for (std::size_t j = 0; j < junctions_.size(); ++j) {
      weight_grads_.emplace_back(junctions_[j].weights.size(), 0.0);
      bias_grads_.emplace_back(biases_[j].size(), 0.0);
    }
  }

  void zero_grads() {
    for (auto& g : weight_grads_) std::fill(g.begin(), g.end(), 0.0);
    for (auto& g : bias_grads_) std::fill(g.begin(), g.end(), 0.0);
  }

  // Backprop for the most recent feedforward; adds into the grad buffers.
  void accumulate_gradients(std::uint32_t label) {
    std::size_t last = junctions_.size();
    std::vector<double>& dout = deltas_[last];
    const std::vector<double>& scores = acts_[last];
    for (std::size_t c = 0; c < dout.size(); ++c)
      dout[c] = scores[c] - (c == label ? 1.0 : 0.0);
    for (std::size_t j = junctions_.size(); j-- > 0;) {
      const Junction& jn = junctions_[j];
      const std::uint32_t fi = jn.config.fan_in;
      const std::vector<double>& dright = deltas_[j + 1];
      const std::vector<double>& act = acts_[j];
      std::vector<double>& gw = weight_grads_[j];
      std::vector<double>& gb = bias_grads_[j];
      std::vector<double>& dleft = deltas_[j];
      bool propagate = j > 0;
      if (propagate) std::fill(dleft.begin(), dleft.end(), 0.0);
      for (std::uint32_t r = 0; r < jn.config.right_neurons; ++r) {
        double d = dright[r];
        gb[r] += d;
        std::uint64_t base = static_cast<std::uint64_t>(r) * fi;
        for (std::uint32_t q = 0; q < fi; ++q) {
          std::uint32_t l = jn.edge_left[base + q];
          gw[base + q] += d * act[l];
          if (propagate) dleft[l] += d * jn.weights[base + q];
        }
      }
      if (propagate) {
        const std::vector<double>& pre = preacts_[j];
        for (std::size_t l = 0; l < dleft.size(); ++l)
          if (pre[l] <= 0) dleft[l] = 0.0;
      }
    }
  }

  void apply_grads(double scaled_rate) {
    for (std::size_t j = 0; j < junctions_.size(); ++j) {
      std::vector<double>& w = junctions_[j].weights;
      const std::vector<double>& gw = weight_grads_[j];
      for (std::size_t e = 0; e < w.size(); ++e) w[e] -= scaled_rate * gw[e];
      std::vector<double>& b = biases_[j];
      const std::vector<double>& gb = bias_grads_[j];
      for (std::size_t r = 0; r < b.size(); ++r) b[r] -= scaled_rate * gb[r];
    }
  }

  NetworkConfig config_;
  std::vector<Junction> junctions_;
  std::vector<std::vector<double>> biases_;
  std::vector<std::vector<double>> acts_, preacts_, deltas_;
  std::vector<std::vector<double>> weight_grads_;
  std::vector<std::vector<double>> bias_grads_;
};

}  // namespace ilv
