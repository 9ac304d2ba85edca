// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#include "aerofl/learner.hpp"

#include <cmath>
#include <stdexcept>

namespace aerofl {

namespace {

// Returns column-wise softmax of the logits and the mean cross-entropy.
double softmax_xent(const Eigen::MatrixXd& logits,
                    const Eigen::Ref<const Eigen::VectorXi>& y,
                    Eigen::MatrixXd* probs) {
  const int n = static_cast<int>(logits.cols());
  double loss = 0.0;
  if (probs) probs->resize(logits.rows(), n);
  for (int j = 0; j < n; ++j) {
    const double m = logits.col(j).maxCoeff();
    Eigen::VectorXd e = (logits.col(j).array() - m).exp();
    const double z = e.sum();
    loss += std::log(z) - (logits(y[j], j) - m);
    if (probs) probs->col(j) = e / z;
  }
  return loss / n;
}

void check_batch(const ParamVector& w,
                 const Eigen::Ref<const Eigen::MatrixXd>& x,
                 const Eigen::Ref<const Eigen::VectorXi>& y) {
  if (x.cols() == 0) throw std::invalid_argument("learner: empty batch");
  if (x.rows() != w.inputs || y.size() != x.cols())
    throw std::invalid_argument("learner: batch shape mismatch");
  if (!w.values.allFinite())
    throw std::invalid_argument("learner: non-finite parameters");
}

}  // namespace

std::vector<ParamVector::Segment> ParamVector::layout() const {
  const int hw1 = hidden * inputs;
  const int hw2 = classes * hidden;
  return {{"w1", 0, hw1},
          {"b1", hw1, hidden},
          {"w2", hw1 + hidden, hw2},
          {"b2", hw1 + hidden + hw2, classes}};
}

ParamVector ParamVector::random_init(int f, int h, int c, Rng& rng) {
  ParamVector w(f, h, c);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(f));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(h));
  for (int i = 0; i < h * f; ++i) w.values[i] = s1 * rng.normal();
  const int off2 = h * f + h;
  for (int i = 0; i < c * h; ++i) w.values[off2 + i] = s2 * rng.normal();
  return w;  // biases start at zero
}

void SgdConfig::validate() const {
  if (rho >= kappa)
    throw std::invalid_argument("sgd: rho must be smaller than kappa");
  if (rho < 0 || batch_size <= 0 || batches_per_round <= 0)
    throw std::invalid_argument("sgd: nonpositive configuration value");
  if (global_lr.initial <= 0.0 || local_lr.initial <= 0.0 ||
      global_lr.decay <= 0.0 || global_lr.decay > 1.0 ||
      local_lr.decay <= 0.0 || local_lr.decay > 1.0)
    throw std::invalid_argument("sgd: learning-rate schedule must be positive and non-increasing");
}

double forward_loss(const ParamVector& w,
                    const Eigen::Ref<const Eigen::MatrixXd>& x,
                    const Eigen::Ref<const Eigen::VectorXi>& y) {
  check_batch(w, x, y);
  const Eigen::MatrixXd a1 =
      ((w.w1() * x).colwise() + w.b1()).array().tanh().matrix();
  const Eigen::MatrixXd logits = (w.w2() * a1).colwise() + w.b2();
  return softmax_xent(logits, y, nullptr);
}

Eigen::VectorXd gradient(const ParamVector& w,
                         const Eigen::Ref<const Eigen::MatrixXd>& x,
                         const Eigen::Ref<const Eigen::VectorXi>& y) {
  check_batch(w, x, y);
  const int n = static_cast<int>(x.cols());
  const Eigen::MatrixXd a1 =
      ((w.w1() * x).colwise() + w.b1()).array().tanh().matrix();
  const Eigen::MatrixXd logits = (w.w2() * a1).colwise() + w.b2();
  Eigen::MatrixXd probs;
  softmax_xent(logits, y, &probs);

  Eigen::MatrixXd dz2 = probs;  // softmax - onehot, averaged over the batch
  for (int j = 0; j < n; ++j) dz2(y[j], j) -= 1.0;
  dz2 /= static_cast<double>(n);

  const Eigen::MatrixXd dw2 = dz2 * a1.transpose();
  const Eigen::VectorXd db2 = dz2.rowwise().sum();
  const Eigen::MatrixXd dz1 =
      (w.w2().transpose() * dz2).array() * (1.0 - a1.array().square());
  const Eigen::MatrixXd dw1 = dz1 * x.transpose();
  const Eigen::VectorXd db1 = dz1.rowwise().sum();

  Eigen::VectorXd g(w.size());
  const int hw1 = w.hidden * w.inputs;
  const int hw2 = w.classes * w.hidden;
  Eigen::Map<Eigen::MatrixXd>(g.data(), w.hidden, w.inputs) = dw1;
  g.segment(hw1, w.hidden) = db1;
  Eigen::Map<Eigen::MatrixXd>(g.data() + hw1 + w.hidden, w.classes, w.hidden) =
      dw2;
  g.segment(hw1 + w.hidden + hw2, w.classes) = db2;
  return g;
}

double dataset_loss(const ParamVector& w, const LocalDataset& ds) {
  return forward_loss(w, ds.features(), ds.labels());
}

Eigen::VectorXd dataset_gradient(const ParamVector& w, const LocalDataset& ds) {
  return gradient(w, ds.features(), ds.labels());
}

double prefix_loss(const ParamVector& w, const LocalDataset& ds, int n) {
  return forward_loss(w, ds.feature_prefix(n), ds.label_prefix(n));
}

Eigen::VectorXd prefix_gradient(const ParamVector& w, const LocalDataset& ds,
                                int n) {
  return gradient(w, ds.feature_prefix(n), ds.label_prefix(n));
}

ParamVector masked_sgd_steps(const ParamVector& w0, const Mask& mask, int steps,
                             double lr, const LocalDataset& ds, int prefix_size,
                             int batch_size, Rng& rng,
                             std::vector<double>* step_losses) {
  if (mask.size() != w0.size())
    throw std::invalid_argument("masked_sgd_steps: mask length mismatch");
  if (steps < 0) throw std::invalid_argument("masked_sgd_steps: negative steps");
  if (prefix_size <= 0)
    throw std::invalid_argument("masked_sgd_steps: empty dataset");

  const int b = std::min(batch_size, prefix_size);
  ParamVector w = w0;
  Eigen::MatrixXd bx(ds.feature_dim(), b);
  Eigen::VectorXi by(b);
  const auto feats = ds.features();
  const auto labs = ds.labels();
  for (int s = 0; s < steps; ++s) {
    for (int j = 0; j < b; ++j) {
      const int i = rng.uniform_int(prefix_size);
      bx.col(j) = feats.col(i);
      by[j] = labs[i];
    }
    if (step_losses) step_losses->push_back(forward_loss(w, bx, by));
    const Eigen::VectorXd g = gradient(w, bx, by);
    w.values.array() -= lr * g.array() * mask.bits.array();
  }
  return w;
}

Eigen::VectorXd model_difference(const ParamVector& w_start,
                                 const ParamVector& w_end, double lr) {
  if (lr <= 0.0)
    throw std::invalid_argument("model_difference: lr must be positive");
  return (w_start.values - w_end.values) / lr;
}

}  // namespace aerofl
