// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "aerofl/datagen.hpp"
#include "aerofl/rng.hpp"

namespace aerofl {

// Flat parameter vector of a two-layer tanh perceptron (F -> H -> C) with a
// named segment table. Layout order: w1 (H*F), b1 (H), w2 (C*H), b2 (C).
struct ParamVector {
  Eigen::VectorXd values;
  int inputs = 0;   // F
  int hidden = 0;   // H
  int classes = 0;  // C

  ParamVector() = default;
  ParamVector(int f, int h, int c)
      : values(Eigen::VectorXd::Zero(f * h + h + h * c + c)),
        inputs(f),
        hidden(h),
        classes(c) {}

  int size() const { return static_cast<int>(values.size()); }

  struct Segment {
    std::string name;
    int offset;
    int length;
  };
  std::vector<Segment> layout() const;

  Eigen::Map<const Eigen::MatrixXd> w1() const {
    return {values.data(), hidden, inputs};
  }
  Eigen::Map<const Eigen::VectorXd> b1() const {
    return {values.data() + hidden * inputs, hidden};
  }
  Eigen::Map<const Eigen::MatrixXd> w2() const {
    return {values.data() + hidden * inputs + hidden, classes, hidden};
  }
  Eigen::Map<const Eigen::VectorXd> b2() const {
    return {values.data() + hidden * inputs + hidden + classes * hidden,
            classes};
  }

  static ParamVector random_init(int f, int h, int c, Rng& rng);
};

// Binary pruning mask over the flat parameter vector; stored as 0/1 doubles
// so it composes with Eigen expressions directly.
struct Mask {
  Eigen::VectorXd bits;

  static Mask ones(int p) { return {Eigen::VectorXd::Ones(p)}; }
  int size() const { return static_cast<int>(bits.size()); }
  int zero_count() const {
    return static_cast<int>((bits.array() == 0.0).count());
  }
  double prune_fraction() const {
    return size() == 0 ? 0.0 : static_cast<double>(zero_count()) / size();
  }
};

// Learning-rate schedule: initial value decayed by a fixed factor every
// decay_every global rounds.
struct LrSchedule {
  double initial = 0.1;
  double decay = 0.9;
  int decay_every = 20;

  double at(int t) const {
    return initial * std::pow(decay, t / decay_every);
  }
};

struct SgdConfig {
  LrSchedule global_lr{0.1, 0.9, 20};
  LrSchedule local_lr{0.1, 0.9, 50};
  int kappa = 5;             // local rounds per global round
  int rho = 1;               // dense warm-up rounds
  int batch_size = 64;
  int batches_per_round = 1;

  void validate() const;
};

// Mean cross-entropy of the softmax outputs over a batch of columns.
double forward_loss(const ParamVector& w,
                    const Eigen::Ref<const Eigen::MatrixXd>& x,
                    const Eigen::Ref<const Eigen::VectorXi>& y);

// Exact gradient of forward_loss via backpropagation.
Eigen::VectorXd gradient(const ParamVector& w,
                         const Eigen::Ref<const Eigen::MatrixXd>& x,
                         const Eigen::Ref<const Eigen::VectorXi>& y);

double dataset_loss(const ParamVector& w, const LocalDataset& ds);
Eigen::VectorXd dataset_gradient(const ParamVector& w, const LocalDataset& ds);

// Loss/gradient over the first n samples of the dataset (round snapshots).
double prefix_loss(const ParamVector& w, const LocalDataset& ds, int n);
Eigen::VectorXd prefix_gradient(const ParamVector& w, const LocalDataset& ds,
                                int n);

// Mini-batch SGD with every gradient masked elementwise; masked coordinates
// stay exactly zero. Batches are drawn uniformly with replacement from the
// first prefix_size samples. Returns the updated parameters; if step_losses
// is non-null the per-step batch losses are appended to it.
ParamVector masked_sgd_steps(const ParamVector& w0, const Mask& mask, int steps,
                             double lr, const LocalDataset& ds, int prefix_size,
                             int batch_size, Rng& rng,
                             std::vector<double>* step_losses = nullptr);

// Accumulated update direction (w_start - w_end) / lr.
Eigen::VectorXd model_difference(const ParamVector& w_start,
                                 const ParamVector& w_end, double lr);

}  // namespace aerofl
