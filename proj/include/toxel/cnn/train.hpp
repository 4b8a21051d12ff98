#pragma once

// Training and evaluation of the Betti classifier on manifest datasets.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "toxel/agreement.hpp"
#include "toxel/betti.hpp"
#include "toxel/cnn/checkpoint.hpp"
#include "toxel/cnn/loss.hpp"
#include "toxel/cnn/model.hpp"
#include "toxel/cnn/optim.hpp"
#include "toxel/dataset.hpp"
#include "toxel/downscale.hpp"
#include "toxel/generator.hpp"
#include "toxel/grid4.hpp"
#include "toxel/rotation.hpp"

namespace toxel::cnn {

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 192;
  double lr = 1e-3;
  std::vector<std::size_t> lr_drop_epochs{160, 190};
  double lr_drop_factor = 10.0;
  std::array<double, 3> split{0.90, 0.05, 0.05};  // train, validation, test
  bool augment = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (epochs == 0 || batch_size == 0) throw ParameterError("epochs and batch_size must be positive");
    if (!(lr > 0.0) || !(lr_drop_factor > 0.0)) throw ParameterError("learning rates must be positive");
    for (std::size_t d : lr_drop_epochs) {
      if (d >= epochs) throw ParameterError("lr drop epoch " + std::to_string(d) + " is not before the last epoch");
    }
    for (double s : split) {
      if (s < 0.0) throw ParameterError("split fractions must be non-negative");
    }
    if (std::abs(split[0] + split[1] + split[2] - 1.0) > 1e-9) {
      throw ParameterError("split fractions must sum to 1");
    }
  }

  static double base_lr(DownscaleMode mode) { return mode == DownscaleMode::AvgPool ? 1e-4 : 1e-3; }

  static TrainConfig full(DownscaleMode mode) {
    TrainConfig t;
    t.lr = base_lr(mode);
    return t;
  }

  /// Short schedule with drops at 80% and 95% of the epochs.
  static TrainConfig desk(DownscaleMode mode, std::size_t epochs = 50) {
    TrainConfig t;
    t.epochs = epochs;
    t.batch_size = 16;
    t.lr = base_lr(mode);
    t.lr_drop_epochs = {epochs * 80 / 100, epochs * 95 / 100};
    return t;
  }
};

inline CNNConfig desk_cnn_config(std::size_t input_size = 16) {
  CNNConfig c;
  c.input_size = input_size;
  c.conv_channels = {8, 16};
  return c;
}

struct Dataset {
  std::vector<FloatGrid> grids;
  std::vector<BettiVector> labels;
  std::size_t size() const { return grids.size(); }
};

inline FloatGrid to_float(const AnyGrid& g) {
  if (const auto* f = std::get_if<FloatGrid>(&g)) return *f;
  const auto& b = std::get<BinaryGrid>(g);
  FloatGrid out(b.dims());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = static_cast<float>(b[i]);
  return out;
}

inline void check_sample(const FloatGrid& g, const BettiVector& label, std::size_t input_size,
                         const HeadSizes& heads, const std::string& name) {
  if (g.dims() != Dims4::cube(input_size)) {
    throw ShapeError(name + ": grid " + to_string(g.dims()) + " does not match the network input " +
                     std::to_string(input_size) + "^4");
  }
  try {
    check_target(label, heads);
  } catch (const LabelError& e) {
    throw LabelError(name + ": " + e.what());
  }
}

/// Loads every grid of a manifest with its manifest Betti vector as label.
inline Dataset load_dataset(const Manifest& m, std::size_t input_size, const HeadSizes& heads = kDefaultHeads) {
  Dataset d;
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    FloatGrid g = to_float(read_grid_file(m.grid_path(i)));
    check_sample(g, m.entries[i].betti, input_size, heads, m.entries[i].grid);
    d.grids.push_back(std::move(g));
    d.labels.push_back(m.entries[i].betti);
  }
  return d;
}

struct Split {
  std::vector<std::size_t> train, val, test;
};

inline Split make_split(std::size_t n, const std::array<double, 3>& fractions, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 1));
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(fractions[0] * static_cast<double>(n)));
  const auto n_val = std::min(n - std::min(n, n_train),
                              static_cast<std::size_t>(std::llround(fractions[1] * static_cast<double>(n))));
  Split s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(std::min(n, n_train)));
  s.val.assign(idx.begin() + static_cast<std::ptrdiff_t>(s.train.size()),
               idx.begin() + static_cast<std::ptrdiff_t>(s.train.size() + n_val));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(s.train.size() + n_val), idx.end());
  return s;
}

template <class T>
Tensor<T> to_input(const FloatGrid& g) {
  const std::size_t s = g.extent(0);
  Tensor<T> x({1, 1, g.extent(3), g.extent(2), g.extent(1), s});
  for (std::size_t i = 0; i < g.size(); ++i) x[i] = static_cast<T>(g[i]);
  return x;
}

template <class T>
BettiVector predict_one(const Model<T>& model, const FloatGrid& g) {
  return predict(model.forward(to_input<T>(g)), model.config().heads)[0];
}

template <class T>
std::vector<BettiVector> predict_all(const Model<T>& model, const std::vector<FloatGrid>& grids,
                                     const std::vector<std::size_t>& indices) {
  std::vector<BettiVector> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(predict_one(model, grids[i]));
  return out;
}

template <class T>
AgreementReport evaluate(const Model<T>& model, const Dataset& d, const std::vector<std::size_t>& indices) {
  std::vector<BettiVector> truth;
  for (std::size_t i : indices) truth.push_back(d.labels[i]);
  const auto pred = predict_all(model, d.grids, indices);
  return agreement(truth, pred);
}

template <class T>
AgreementReport evaluate(const Model<T>& model, const Dataset& d) {
  std::vector<std::size_t> all(d.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return evaluate(model, d, all);
}

struct EpochMetrics {
  std::size_t epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  AgreementReport val;
};

inline nlohmann::json report_to_json(const AgreementReport& r) {
  return {{"per_beta", r.per_beta}, {"combined", r.combined}, {"complete", r.complete}, {"count", r.count}};
}

inline std::string metrics_line(const EpochMetrics& m) {
  nlohmann::json j = {{"epoch", m.epoch},
                      {"lr", m.lr},
                      {"train_loss", m.train_loss},
                      {"val_per_beta", m.val.per_beta},
                      {"val_combined", m.val.combined},
                      {"val_count", m.val.count},
                      {"reduction", "sequential"}};
  return j.dump();
}

struct TrainResult {
  Checkpoint<float> checkpoint;
  Split split;
  std::vector<EpochMetrics> history;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Mini-batch Adam training. Samples in a batch are processed one at a time
/// and their gradients summed in batch order, so results do not depend on
/// threading. Optional augmentation applies one random quarter turn per
/// sample draw.
inline TrainResult train(const Dataset& data, const CNNConfig& ccfg, const TrainConfig& tcfg,
                         const EpochCallback& on_epoch = {}, std::optional<Split> split = std::nullopt) {
  ccfg.validate();
  tcfg.validate();
  for (std::size_t i = 0; i < data.size(); ++i) {
    check_sample(data.grids[i], data.labels[i], ccfg.input_size, ccfg.heads, "sample " + std::to_string(i));
  }
  TrainResult res{{Model<float>(ccfg), {}, 0}, split ? *split : make_split(data.size(), tcfg.split, tcfg.seed), {}};
  Model<float>& model = res.checkpoint.model;
  model.initialize(derive_seed(tcfg.seed, 0));
  std::vector<std::size_t> sizes;
  for (const auto& p : model.params()) sizes.push_back(p.size());
  res.checkpoint.adam.init(sizes);
  if (res.split.train.empty()) throw ParameterError("training split is empty");

  Rng shuffle_rng(derive_seed(tcfg.seed, 2));
  Rng aug_rng(derive_seed(tcfg.seed, 3));
  std::vector<std::size_t> order = res.split.train;

  for (std::size_t epoch = 0; epoch < tcfg.epochs; ++epoch) {
    const double lr = lr_schedule(epoch, tcfg.lr, tcfg.lr_drop_epochs, tcfg.lr_drop_factor);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += tcfg.batch_size) {
      const std::size_t b1 = std::min(order.size(), b0 + tcfg.batch_size);
      const float scale = 1.0f / static_cast<float>(b1 - b0);
      model.zero_grad();
      for (std::size_t k = b0; k < b1; ++k) {
        const std::size_t i = order[k];
        Tensor<float> x;
        if (tcfg.augment) {
          const QuarterTurn q = random_quarter_turn(aug_rng);
          x = to_input<float>(rotate90(data.grids[i], q.plane, q.turns));
        } else {
          x = to_input<float>(data.grids[i]);
        }
        Model<float>::Cache cache;
        const Tensor<float> logits = model.forward(x, &cache);
        const BettiVector target = data.labels[i];
        LossResult<float> loss = multihead_loss(logits, std::span<const BettiVector>(&target, 1), ccfg.heads);
        loss_sum += static_cast<double>(loss.loss);
        for (auto& g : loss.grad.data) g *= scale;
        model.backward(cache, loss.grad);
      }
      std::vector<std::vector<float>*> ps;
      std::vector<const std::vector<float>*> gs;
      for (std::size_t p = 0; p < model.params().size(); ++p) {
        ps.push_back(&model.params()[p].data);
        gs.push_back(&model.grads()[p].data);
      }
      adam_step(ps, gs, res.checkpoint.adam, lr);
    }
    EpochMetrics m;
    m.epoch = epoch;
    m.lr = lr;
    m.train_loss = loss_sum / static_cast<double>(order.size());
    m.val = evaluate(model, data, res.split.val);
    res.checkpoint.epochs = epoch + 1;
    res.history.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  model.zero_grad();
  return res;
}

}  // namespace toxel::cnn
