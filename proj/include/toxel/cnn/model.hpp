#pragma once

// The Betti-number classifier: repeated (conv4d, relu, maxpool) stages,
// then flatten, linear, relu, linear into one logit group per Betti number.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "toxel/cnn/layers.hpp"
#include "toxel/cnn/loss.hpp"
#include "toxel/cnn/tensor.hpp"
#include "toxel/error.hpp"

namespace toxel::cnn {

struct CNNConfig {
  std::size_t input_size = 32;
  std::vector<std::size_t> conv_channels{8, 16, 32, 64};
  std::size_t kernel = 5;
  std::size_t padding = 2;
  std::size_t pool = 2;
  std::size_t fc_hidden = 256;
  HeadSizes heads = kDefaultHeads;

  std::size_t final_extent() const {
    std::size_t s = input_size;
    for (std::size_t i = 0; i < conv_channels.size(); ++i) s /= pool;
    return s;
  }

  std::size_t flatten_length() const {
    const std::size_t e = final_extent();
    return conv_channels.back() * e * e * e * e;
  }

  void validate() const {
    if (conv_channels.empty()) throw ParameterError("at least one conv stage is required");
    if (kernel == 0 || pool == 0 || fc_hidden == 0 || input_size == 0) {
      throw ParameterError("network sizes must be positive");
    }
    if (2 * padding + 1 != kernel) {
      throw ParameterError("kernel and padding must preserve the spatial extent (kernel = 2 padding + 1)");
    }
    std::size_t s = input_size;
    for (std::size_t i = 0; i < conv_channels.size(); ++i) {
      if (conv_channels[i] == 0) throw ParameterError("conv channel counts must be positive");
      if (s % pool != 0) {
        throw ParameterError("input size " + std::to_string(input_size) + " is not divisible by pool^" +
                             std::to_string(conv_channels.size()));
      }
      s /= pool;
    }
    if (s < 1) throw ParameterError("input too small for the number of stages");
    for (std::size_t h : heads) {
      if (h == 0) throw ParameterError("head sizes must be positive");
    }
  }

  bool operator==(const CNNConfig&) const = default;
};

template <class T>
class Model {
 public:
  // Per-forward intermediates needed by backward.
  struct Cache {
    std::vector<Tensor<T>> stage_in, conv_out;
    std::vector<std::vector<std::uint32_t>> argmax;
    std::vector<Shape> relu_shape;
    Shape pooled_shape;
    Tensor<T> flat, hidden_pre, hidden;
  };

  Model() = default;

  explicit Model(CNNConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    std::size_t cin = 1;
    const std::size_t k = cfg_.kernel;
    for (std::size_t c : cfg_.conv_channels) {
      params_.emplace_back(Shape{c, cin, k, k, k, k});
      params_.emplace_back(Shape{c});
      cin = c;
    }
    params_.emplace_back(Shape{cfg_.fc_hidden, cfg_.flatten_length()});
    params_.emplace_back(Shape{cfg_.fc_hidden});
    params_.emplace_back(Shape{total_outputs(cfg_.heads), cfg_.fc_hidden});
    params_.emplace_back(Shape{total_outputs(cfg_.heads)});
    zero_grad();
  }

  /// Weights uniform in +-sqrt(6 / fan_in), biases zero.
  void initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < params_.size(); i += 2) {
      Tensor<T>& w = params_[i];
      const std::size_t fan_in = w.size() / w.shape[0];
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (auto& v : w.data) v = static_cast<T>(dist(rng));
      params_[i + 1].zero();
    }
  }

  const CNNConfig& config() const { return cfg_; }
  std::size_t stages() const { return cfg_.conv_channels.size(); }

  std::vector<Tensor<T>>& params() { return params_; }
  const std::vector<Tensor<T>>& params() const { return params_; }
  std::vector<Tensor<T>>& grads() { return grads_; }
  const std::vector<Tensor<T>>& grads() const { return grads_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.size();
    return n;
  }

  void zero_grad() {
    grads_.clear();
    for (const auto& p : params_) grads_.emplace_back(p.shape);
  }

  /// x is (N, 1, s, s, s, s); returns logits (N, sum of head sizes).
  Tensor<T> forward(const Tensor<T>& x, Cache* cache = nullptr) const {
    const Shape want{x.shape.empty() ? 0 : x.shape[0], 1, cfg_.input_size, cfg_.input_size,
                     cfg_.input_size, cfg_.input_size};
    if (x.shape != want) {
      throw ShapeError("model input " + shape_string(x.shape) + ", expected " + shape_string(want));
    }
    Cache local;
    Cache& c = cache ? *cache : local;
    c = Cache{};
    Tensor<T> a = x;
    for (std::size_t s = 0; s < stages(); ++s) {
      Tensor<T> z = conv4d_forward(a, params_[2 * s], params_[2 * s + 1], cfg_.padding);
      Tensor<T> r = relu(z);
      std::vector<std::uint32_t> am;
      Tensor<T> p = maxpool4d(r, am, cfg_.pool);
      if (cache) {
        c.stage_in.push_back(std::move(a));
        c.conv_out.push_back(std::move(z));
        c.relu_shape.push_back(r.shape);
        c.argmax.push_back(std::move(am));
      }
      a = std::move(p);
    }
    const std::size_t f = 2 * stages();
    c.pooled_shape = a.shape;
    Tensor<T> flat = flatten(a);
    Tensor<T> hp = linear_forward(flat, params_[f], params_[f + 1]);
    Tensor<T> h = relu(hp);
    Tensor<T> out = linear_forward(h, params_[f + 2], params_[f + 3]);
    if (cache) {
      c.flat = std::move(flat);
      c.hidden_pre = std::move(hp);
      c.hidden = std::move(h);
    }
    return out;
  }

  /// Accumulates parameter gradients for d loss / d logits into grads().
  void backward(const Cache& c, const Tensor<T>& dlogits) {
    const std::size_t f = 2 * stages();
    auto g2 = linear_backward(c.hidden, params_[f + 2], dlogits);
    accumulate(f + 2, g2.w);
    accumulate(f + 3, g2.b);
    Tensor<T> dh = relu_backward(c.hidden_pre, g2.x);
    auto g1 = linear_backward(c.flat, params_[f], dh);
    accumulate(f, g1.w);
    accumulate(f + 1, g1.b);
    Tensor<T> da = flatten_backward(c.pooled_shape, g1.x);
    for (std::size_t s = stages(); s-- > 0;) {
      Tensor<T> dr = maxpool4d_backward(c.relu_shape[s], c.argmax[s], da);
      Tensor<T> dz = relu_backward(c.conv_out[s], dr);
      auto gc = conv4d_backward(c.stage_in[s], params_[2 * s], dz, cfg_.padding, s > 0);
      accumulate(2 * s, gc.w);
      accumulate(2 * s + 1, gc.b);
      if (s > 0) da = std::move(gc.x);
    }
  }

  template <class U>
  Model<U> cast() const {
    Model<U> m(cfg_);
    for (std::size_t i = 0; i < params_.size(); ++i) m.params()[i] = params_[i].template cast<U>();
    return m;
  }

 private:
  void accumulate(std::size_t i, const Tensor<T>& g) {
    for (std::size_t k = 0; k < g.size(); ++k) grads_[i][k] += g[k];
  }

  CNNConfig cfg_;
  std::vector<Tensor<T>> params_;
  std::vector<Tensor<T>> grads_;
};

}  // namespace toxel::cnn
