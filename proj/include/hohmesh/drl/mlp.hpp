#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hohmesh/core.hpp"

namespace hohmesh::drl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class OutputActivation { Tanh, Identity };

inline constexpr double kLeakySlope = 0.01;

/// Fully connected network. Batches are column-major: one sample per column.
class Mlp {
 public:
  struct Layer {
    Matrix w;  // out x in
    Vector b;
  };

  /// Per-layer pre-activations and activations of one forward pass.
  struct Cache {
    std::vector<Matrix> a;  // a[0] is the input, a[k+1] the output of layer k
    std::vector<Matrix> z;
  };

  struct Gradients {
    std::vector<Matrix> w;
    std::vector<Vector> b;
  };

  Mlp() = default;

  /// Zero-initialized network with the given widths (input first, output last).
  Mlp(std::vector<std::size_t> widths, OutputActivation out) : widths_(std::move(widths)), out_(out) {
    HOHMESH_REQUIRE(widths_.size() >= 2, ErrorKind::DimensionMismatch, "a network needs at least two widths");
    for (std::size_t k = 0; k + 1 < widths_.size(); ++k) {
      HOHMESH_REQUIRE(widths_[k] > 0 && widths_[k + 1] > 0, ErrorKind::DimensionMismatch, "zero layer width");
      const auto in = static_cast<Eigen::Index>(widths_[k]);
      const auto o = static_cast<Eigen::Index>(widths_[k + 1]);
      layers_.push_back({Matrix::Zero(o, in), Vector::Zero(o)});
    }
  }

  /// Uniform weights and biases in +-1/sqrt(fan_in); the last layer is scaled by `last_scale`.
  template <class Rng>
  void init_uniform(Rng& rng, double last_scale = 1.0) {
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      Layer& l = layers_[k];
      const double bound = 1.0 / std::sqrt(static_cast<double>(l.w.cols()));
      const double s = k + 1 == layers_.size() ? last_scale : 1.0;
      std::uniform_real_distribution<double> u(-bound, bound);
      for (Eigen::Index c = 0; c < l.w.cols(); ++c)
        for (Eigen::Index r = 0; r < l.w.rows(); ++r) l.w(r, c) = s * u(rng);
      for (Eigen::Index r = 0; r < l.b.size(); ++r) l.b(r) = s * u(rng);
    }
  }

  const std::vector<std::size_t>& widths() const { return widths_; }
  std::size_t input_dim() const { return widths_.front(); }
  std::size_t output_dim() const { return widths_.back(); }
  OutputActivation output_activation() const { return out_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.w.size() + l.b.size());
    return n;
  }

  Matrix forward(const Matrix& x) const {
    check_input(x);
    Matrix a = x;
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      Matrix z = (layers_[k].w * a).colwise() + layers_[k].b;
      a = activate(z, k + 1 == layers_.size());
    }
    return a;
  }

  Vector forward(const Vector& x) const { return forward(Matrix(x)).col(0); }

  Matrix forward(const Matrix& x, Cache& cache) const {
    check_input(x);
    cache.a.assign(1, x);
    cache.z.clear();
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      cache.z.push_back((layers_[k].w * cache.a.back()).colwise() + layers_[k].b);
      cache.a.push_back(activate(cache.z.back(), k + 1 == layers_.size()));
    }
    return cache.a.back();
  }

  /// Reverse pass for d(loss)/d(output) = `grad_out`; fills parameter gradients
  /// (summed over the batch) and returns d(loss)/d(input).
  Matrix backward(const Cache& cache, const Matrix& grad_out, Gradients& g) const {
    HOHMESH_REQUIRE(cache.z.size() == layers_.size(), ErrorKind::DimensionMismatch, "backward without a forward cache");
    HOHMESH_REQUIRE(grad_out.rows() == static_cast<Eigen::Index>(output_dim()) &&
                        grad_out.cols() == cache.a.front().cols(),
                    ErrorKind::DimensionMismatch, "output gradient shape mismatch");
    g.w.resize(layers_.size());
    g.b.resize(layers_.size());
    Matrix delta = grad_out;
    for (std::size_t k = layers_.size(); k-- > 0;) {
      const bool last = k + 1 == layers_.size();
      const Matrix& z = cache.z[k];
      if (last && out_ == OutputActivation::Tanh) {
        delta = delta.cwiseProduct((1.0 - cache.a[k + 1].array().square()).matrix());
      } else if (!last) {
        delta = delta.cwiseProduct(z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : kLeakySlope; }));
      }
      g.w[k] = delta * cache.a[k].transpose();
      g.b[k] = delta.rowwise().sum();
      delta = layers_[k].w.transpose() * delta;
    }
    return delta;
  }

  /// Parameters flattened layer by layer: weights row-major, then biases.
  std::vector<double> parameters() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    for (const auto& l : layers_) {
      for (Eigen::Index r = 0; r < l.w.rows(); ++r)
        for (Eigen::Index c = 0; c < l.w.cols(); ++c) p.push_back(l.w(r, c));
      for (Eigen::Index r = 0; r < l.b.size(); ++r) p.push_back(l.b(r));
    }
    return p;
  }

  void set_parameters(std::span<const double> p) {
    HOHMESH_REQUIRE(p.size() == parameter_count(), ErrorKind::DimensionMismatch, "parameter count mismatch");
    std::size_t k = 0;
    for (auto& l : layers_) {
      for (Eigen::Index r = 0; r < l.w.rows(); ++r)
        for (Eigen::Index c = 0; c < l.w.cols(); ++c) l.w(r, c) = p[k++];
      for (Eigen::Index r = 0; r < l.b.size(); ++r) l.b(r) = p[k++];
    }
  }

  static std::vector<double> flatten(const Gradients& g) {
    std::vector<double> p;
    for (std::size_t k = 0; k < g.w.size(); ++k) {
      for (Eigen::Index r = 0; r < g.w[k].rows(); ++r)
        for (Eigen::Index c = 0; c < g.w[k].cols(); ++c) p.push_back(g.w[k](r, c));
      for (Eigen::Index r = 0; r < g.b[k].size(); ++r) p.push_back(g.b[k](r));
    }
    return p;
  }

 private:
  void check_input(const Matrix& x) const {
    HOHMESH_REQUIRE(!layers_.empty(), ErrorKind::DimensionMismatch, "empty network");
    HOHMESH_REQUIRE(x.rows() == static_cast<Eigen::Index>(input_dim()), ErrorKind::DimensionMismatch,
                    "input has " + std::to_string(x.rows()) + " rows, network expects " + std::to_string(input_dim()));
  }

  Matrix activate(const Matrix& z, bool last) const {
    if (!last) return z.unaryExpr([](double v) { return v > 0.0 ? v : kLeakySlope * v; });
    if (out_ == OutputActivation::Tanh) return z.array().tanh().matrix();
    return z;
  }

  std::vector<std::size_t> widths_;
  OutputActivation out_ = OutputActivation::Identity;
  std::vector<Layer> layers_;
};

/// Hidden widths shared by actor and critic.
inline std::vector<std::size_t> hidden_widths() { return {512, 256, 256, 128}; }

inline std::vector<std::size_t> make_widths(std::size_t in, std::size_t out,
                                            const std::vector<std::size_t>& hidden = hidden_widths()) {
  std::vector<std::size_t> w{in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

struct AdamSettings {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam over the flattened parameter vector of one network.
struct AdamState {
  AdamSettings settings;
  std::vector<double> m, v;
  std::uint64_t step = 0;

  AdamState() = default;
  AdamState(std::size_t n, AdamSettings s = {}) : settings(s), m(n, 0.0), v(n, 0.0) {}

  /// Descent step: params -= lr * m_hat / (sqrt(v_hat) + eps).
  void apply(std::vector<double>& params, std::span<const double> grads) {
    HOHMESH_REQUIRE(params.size() == m.size() && grads.size() == m.size(), ErrorKind::DimensionMismatch,
                    "Adam state does not match the parameters");
    ++step;
    const double c1 = 1.0 - std::pow(settings.beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(settings.beta2, static_cast<double>(step));
    for (std::size_t k = 0; k < params.size(); ++k) {
      m[k] = settings.beta1 * m[k] + (1.0 - settings.beta1) * grads[k];
      v[k] = settings.beta2 * v[k] + (1.0 - settings.beta2) * grads[k] * grads[k];
      const double mh = m[k] / c1;
      const double vh = v[k] / c2;
      params[k] -= settings.learning_rate * mh / (std::sqrt(vh) + settings.epsilon);
    }
  }

  void apply(Mlp& net, const Mlp::Gradients& g) {
    auto p = net.parameters();
    apply(p, Mlp::flatten(g));
    net.set_parameters(p);
  }
};

}  // namespace hohmesh::drl
