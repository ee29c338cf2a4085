#pragma once

#include <array>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "predprey/nn/net_config.hpp"

namespace predprey::nn {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using RowMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

struct TensorSpec {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index offset = 0;

  Eigen::Index size() const { return rows * cols; }
};

enum class Head { Actor = 0, Critic = 1, Locator = 2 };
inline constexpr int kHeadCount = 3;
inline constexpr int kHeadLayers = 3;

struct LinearSlot {
  int weight = -1;
  int bias = -1;
};

// Named tensors of one policy, laid out back to back in a flat vector.
// Weights are row-major [out, in]; biases are [out, 1].
struct ParamLayout {
  NetConfig config;
  std::vector<TensorSpec> tensors;
  int embedding = -1;
  int gru_weight_input = -1;
  int gru_weight_hidden = -1;
  int gru_bias = -1;
  std::array<std::array<LinearSlot, kHeadLayers>, kHeadCount> heads{};
  Eigen::Index total_size = 0;

  static std::shared_ptr<const ParamLayout> build(const NetConfig& config);

  const LinearSlot& layer(Head head, int index) const {
    return heads[static_cast<int>(head)][index];
  }
  int head_out(Head head) const;
};

template <typename S>
class ParamSet {
 public:
  using MatrixMap = Eigen::Map<RowMat<S>>;
  using ConstMatrixMap = Eigen::Map<const RowMat<S>>;
  using VectorMap = Eigen::Map<Vec<S>>;
  using ConstVectorMap = Eigen::Map<const Vec<S>>;

  ParamSet() = default;
  // All values zero.
  explicit ParamSet(std::shared_ptr<const ParamLayout> layout);

  const ParamLayout& layout() const { return *layout_; }
  const std::shared_ptr<const ParamLayout>& layout_ptr() const { return layout_; }
  const NetConfig& config() const { return layout_->config; }

  MatrixMap matrix(int tensor);
  ConstMatrixMap matrix(int tensor) const;
  VectorMap vector(int tensor);
  ConstVectorMap vector(int tensor) const;

  Vec<S>& flat() { return values_; }
  const Vec<S>& flat() const { return values_; }

  void set_zero() { values_.setZero(); }
  bool all_finite() const { return values_.allFinite(); }

  template <typename T>
  ParamSet<T> cast() const {
    ParamSet<T> out(layout_);
    out.flat() = values_.template cast<T>();
    return out;
  }

 private:
  std::shared_ptr<const ParamLayout> layout_;
  Vec<S> values_;
};

// Orthogonal weights (gain sqrt(2) for hidden MLP layers, 0.01 for the actor
// output, 1 for critic/locator outputs and GRU matrices), zero biases and a
// standard-normal action embedding.
void initialize(ParamSet<float>& params, std::mt19937_64& rng);

// Orthogonal matrix of the given shape scaled by gain, following the usual
// QR-of-a-Gaussian construction with sign correction.
RowMat<double> orthogonal(Eigen::Index rows, Eigen::Index cols, double gain, std::mt19937_64& rng);

extern template class ParamSet<float>;
extern template class ParamSet<double>;

}  // namespace predprey::nn
