#include "predprey/nn/params.hpp"

#include <cmath>
#include <stdexcept>

namespace predprey::nn {

void NetConfig::validate() const {
  if (hidden_width <= 0 || obs_dim <= 0 || embed_dim <= 0)
    throw std::invalid_argument("network sizes must be positive");
  if (action_count != 4) throw std::invalid_argument("action_count must be 4");
  if (locator_out != 144) throw std::invalid_argument("locator_out must be 144");
}

namespace {

constexpr std::array<const char*, kHeadCount> kHeadNames = {"actor", "critic", "locator"};

}  // namespace

int ParamLayout::head_out(Head head) const {
  switch (head) {
    case Head::Actor:
      return config.action_count;
    case Head::Critic:
      return 1;
    case Head::Locator:
      return config.locator_out;
  }
  return 0;
}

std::shared_ptr<const ParamLayout> ParamLayout::build(const NetConfig& config) {
  config.validate();
  auto layout = std::make_shared<ParamLayout>();
  layout->config = config;
  auto add = [&](std::string name, Eigen::Index rows, Eigen::Index cols) {
    layout->tensors.push_back({std::move(name), rows, cols, layout->total_size});
    layout->total_size += rows * cols;
    return static_cast<int>(layout->tensors.size() - 1);
  };

  const Eigen::Index h = config.hidden_width;
  layout->embedding = add("embedding", config.action_count + 1, config.embed_dim);
  layout->gru_weight_input = add("gru.weight_input", 3 * h, config.gru_input_dim());
  layout->gru_weight_hidden = add("gru.weight_hidden", 3 * h, h);
  layout->gru_bias = add("gru.bias", 3 * h, 1);
  for (int head = 0; head < kHeadCount; ++head) {
    const std::string prefix = kHeadNames[head];
    for (int l = 0; l < kHeadLayers; ++l) {
      const Eigen::Index out = (l + 1 == kHeadLayers) ? layout->head_out(static_cast<Head>(head)) : h;
      const std::string base = prefix + "." + std::to_string(l);
      layout->heads[head][l].weight = add(base + ".weight", out, h);
      layout->heads[head][l].bias = add(base + ".bias", out, 1);
    }
  }
  return layout;
}

template <typename S>
ParamSet<S>::ParamSet(std::shared_ptr<const ParamLayout> layout)
    : layout_(std::move(layout)), values_(Vec<S>::Zero(layout_->total_size)) {}

template <typename S>
typename ParamSet<S>::MatrixMap ParamSet<S>::matrix(int tensor) {
  const TensorSpec& t = layout_->tensors[tensor];
  return MatrixMap(values_.data() + t.offset, t.rows, t.cols);
}

template <typename S>
typename ParamSet<S>::ConstMatrixMap ParamSet<S>::matrix(int tensor) const {
  const TensorSpec& t = layout_->tensors[tensor];
  return ConstMatrixMap(values_.data() + t.offset, t.rows, t.cols);
}

template <typename S>
typename ParamSet<S>::VectorMap ParamSet<S>::vector(int tensor) {
  const TensorSpec& t = layout_->tensors[tensor];
  return VectorMap(values_.data() + t.offset, t.size());
}

template <typename S>
typename ParamSet<S>::ConstVectorMap ParamSet<S>::vector(int tensor) const {
  const TensorSpec& t = layout_->tensors[tensor];
  return ConstVectorMap(values_.data() + t.offset, t.size());
}

template class ParamSet<float>;
template class ParamSet<double>;

RowMat<double> orthogonal(Eigen::Index rows, Eigen::Index cols, double gain, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool wide = rows < cols;
  const Eigen::Index tall_rows = wide ? cols : rows;
  const Eigen::Index tall_cols = wide ? rows : cols;
  Mat<double> gaussian(tall_rows, tall_cols);
  for (Eigen::Index i = 0; i < gaussian.size(); ++i) gaussian.data()[i] = normal(rng);

  Eigen::HouseholderQR<Mat<double>> qr(gaussian);
  Mat<double> q = qr.householderQ() * Mat<double>::Identity(tall_rows, tall_cols);
  const Mat<double> r = qr.matrixQR().topRows(tall_cols).template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < tall_cols; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  RowMat<double> out = wide ? RowMat<double>(q.transpose()) : RowMat<double>(q);
  return gain * out;
}

void initialize(ParamSet<float>& params, std::mt19937_64& rng) {
  const ParamLayout& layout = params.layout();
  params.set_zero();

  std::normal_distribution<double> normal(0.0, 1.0);
  auto embedding = params.matrix(layout.embedding);
  for (Eigen::Index i = 0; i < embedding.size(); ++i) embedding.data()[i] = static_cast<float>(normal(rng));

  auto fill = [&](int tensor, double gain) {
    const TensorSpec& t = layout.tensors[tensor];
    params.matrix(tensor) = orthogonal(t.rows, t.cols, gain, rng).cast<float>();
  };
  fill(layout.gru_weight_input, 1.0);
  fill(layout.gru_weight_hidden, 1.0);

  const double hidden_gain = std::sqrt(2.0);
  for (int head = 0; head < kHeadCount; ++head) {
    for (int l = 0; l < kHeadLayers; ++l) {
      double gain = hidden_gain;
      if (l + 1 == kHeadLayers) gain = (static_cast<Head>(head) == Head::Actor) ? 0.01 : 1.0;
      fill(layout.heads[head][l].weight, gain);
    }
  }
}

}  // namespace predprey::nn
