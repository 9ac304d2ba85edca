// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#include "aerofl/datagen.hpp"

#include <cmath>

#include "doctest.h"

using namespace aerofl;

namespace {

RoiConfig test_roi() {
  RoiConfig roi;
  roi.width = 1000;
  roi.height = 1000;
  return roi;
}

SpatialField single_cluster(Eigen::Vector2d mean = {0, 0},
                            Eigen::Matrix2d cov = Eigen::Matrix2d::Identity()) {
  SpatialField f;
  f.clusters.push_back({mean, cov, 1.0});
  return f;
}

// Scalar bivariate normal density written without matrix machinery.
double scalar_normal_pdf(double x, double y, double mx, double my, double a,
                         double b, double c) {
  // covariance [[a, b], [b, c]]
  const double det = a * c - b * b;
  const double dx = x - mx, dy = y - my;
  const double quad = (c * dx * dx - 2 * b * dx * dy + a * dy * dy) / det;
  return std::exp(-0.5 * quad) / (2.0 * M_PI * std::sqrt(det));
}

TemporalDistribution uniform_temporal(int classes, int horizon) {
  TemporalDistribution t;
  t.horizon = horizon;
  t.mapping = Eigen::MatrixXd::Zero(classes, 4);
  return t;
}

}  // namespace

TEST_CASE("gmm density at the mean of a unit cluster") {
  const auto field = single_cluster();
  CHECK(gmm_density({0, 0}, field) == doctest::Approx(0.15915494309189535).epsilon(1e-12));
}

TEST_CASE("two identical clusters match the single-cluster density") {
  SpatialField twin;
  twin.clusters.push_back({{10, 20}, Eigen::Matrix2d::Identity() * 3.0, 0.5});
  twin.clusters.push_back({{10, 20}, Eigen::Matrix2d::Identity() * 3.0, 0.5});
  const auto one = single_cluster({10, 20}, Eigen::Matrix2d::Identity() * 3.0);
  const Eigen::Vector2d q(11.5, 18.0);
  CHECK(gmm_density(q, twin) == doctest::Approx(gmm_density(q, one)).epsilon(1e-14));
}

TEST_CASE("gmm density matches an independent scalar implementation") {
  const auto field = single_cluster();
  CHECK(gmm_density({1, 0}, field) ==
        doctest::Approx(scalar_normal_pdf(1, 0, 0, 0, 1, 0, 1)).epsilon(1e-13));
  SpatialField skew;
  Eigen::Matrix2d cov;
  cov << 4.0, 1.2, 1.2, 2.5;
  skew.clusters.push_back({{3, -2}, cov, 1.0});
  CHECK(gmm_density({1.0, 0.5}, skew) ==
        doctest::Approx(scalar_normal_pdf(1.0, 0.5, 3, -2, 4.0, 1.2, 2.5))
            .epsilon(1e-13));
}

TEST_CASE("gmm density integrates to one on a wide grid") {
  const auto field = single_cluster({0, 0}, Eigen::Matrix2d::Identity() * 2.0);
  const double lo = -12, hi = 12;
  const int n = 240;
  const double h = (hi - lo) / n;
  double integral = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      integral += gmm_density({lo + (i + 0.5) * h, lo + (j + 0.5) * h}, field) * h * h;
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("singular covariance is rejected") {
  SpatialField bad;
  Eigen::Matrix2d cov;
  cov << 1.0, 1.0, 1.0, 1.0;
  bad.clusters.push_back({{0, 0}, cov, 1.0});
  CHECK_THROWS_AS(bad.validate(test_roi()), std::invalid_argument);
  CHECK_THROWS_AS(gmm_density({0, 0}, bad), std::invalid_argument);
}

TEST_CASE("softmax of zero logits is uniform") {
  TemporalDistribution t = uniform_temporal(10, 20);
  const Eigen::VectorXd psi = class_distribution(t, 3);
  for (int c = 0; c < 10; ++c) CHECK(psi[c] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(psi.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("softmax shift invariance") {
  Eigen::VectorXd logits(3);
  logits << 0.4, -1.2, 2.0;
  const Eigen::VectorXd base = softmax(logits);
  const Eigen::VectorXd shifted = softmax(logits.array() + 123.0);
  for (int c = 0; c < 3; ++c) CHECK(base[c] == doctest::Approx(shifted[c]).epsilon(1e-12));
}

TEST_CASE("softmax of (1, 0)") {
  Eigen::VectorXd logits(2);
  logits << 1.0, 0.0;
  const Eigen::VectorXd psi = softmax(logits);
  CHECK(psi[0] == doctest::Approx(0.7310585786300049).epsilon(1e-12));
  CHECK(psi[1] == doctest::Approx(0.2689414213699951).epsilon(1e-12));
}

TEST_CASE("class distribution sums to one with positive entries") {
  TemporalDistribution t;
  t.horizon = 50;
  Rng rng(11);
  t.mapping.resize(7, 4);
  for (int c = 0; c < 7; ++c)
    for (int k = 0; k < 4; ++k) t.mapping(c, k) = rng.uniform(-1, 1);
  for (int round = 0; round < 50; ++round) {
    const Eigen::VectorXd psi = class_distribution(t, round);
    CHECK(std::abs(psi.sum() - 1.0) < 1e-9);
    CHECK(psi.minCoeff() > 0.0);
  }
}

TEST_CASE("footprint area") {
  CHECK(footprint_area(100.0, M_PI / 4) == doctest::Approx(40000.0).epsilon(1e-9));
  CHECK(footprint_area(0.0, M_PI / 4) == 0.0);
  CHECK(footprint_area(120.0, M_PI / 6) == doctest::Approx(19200.0).epsilon(1e-9));
  CHECK_THROWS_AS(footprint_area(100.0, M_PI / 2), std::invalid_argument);
}

TEST_CASE("arrivals examples") {
  SpatialField field = single_cluster({0, 0});
  Eigen::VectorXi none = Eigen::VectorXi::Zero(1);
  Eigen::VectorXi on = Eigen::VectorXi::Ones(1);
  Eigen::VectorXd psi(1);

  psi << 0.1;
  CHECK(arrivals({0, 0}, none, psi, 420, field) == 0);
  CHECK(arrivals({0, 0}, on, psi, 420, field) == 42);

  psi << 0.5;
  const double d = std::log(2.0);
  CHECK(arrivals({d, 0}, on, psi, 80, field) == 20);
}

TEST_CASE("arrivals decrease with distance") {
  SpatialField field = single_cluster({0, 0});
  Eigen::VectorXi on = Eigen::VectorXi::Ones(1);
  Eigen::VectorXd psi(1);
  psi << 0.61;
  int prev = 1 << 20;
  for (double dist = 0.0; dist < 6.0; dist += 0.37) {
    const int n = arrivals({dist, 0}, on, psi, 400, field);
    CHECK(n <= prev);
    prev = n;
  }
}

TEST_CASE("init_dataset examples") {
  const FeatureModel model = FeatureModel::make(10, 16);
  TemporalDistribution t = uniform_temporal(10, 30);
  Rng rng(3);
  const LocalDataset ds = init_dataset(0, t, 512, model, rng);
  CHECK(ds.size() == 52 * 10);
  for (int c = 0; c < 10; ++c) {
    int count = 0;
    for (int i = 0; i < ds.size(); ++i) count += ds.labels()[i] == c ? 1 : 0;
    CHECK(count == 52);
  }
  CHECK((ds.arrival_rounds().array() == 0).all());

  Rng rng2(3);
  CHECK_THROWS_AS(init_dataset(0, t, 0, model, rng2), std::invalid_argument);

  const FeatureModel single = FeatureModel::make(1, 4);
  TemporalDistribution t1 = uniform_temporal(1, 5);
  Rng rng3(4);
  CHECK(init_dataset(0, t1, 512, single, rng3).size() == 512);
}

TEST_CASE("sense_and_update appends exactly the arrival count") {
  const FeatureModel model = FeatureModel::make(3, 8);
  SpatialField field;
  field.clusters.push_back({{0, 0}, Eigen::Matrix2d::Identity() * 100, 0.4});
  field.clusters.push_back({{50, 0}, Eigen::Matrix2d::Identity() * 100, 0.3});
  field.clusters.push_back({{0, 50}, Eigen::Matrix2d::Identity() * 100, 0.3});
  TemporalDistribution t = uniform_temporal(3, 10);

  Rng rng(7);
  LocalDataset ds = init_dataset(1, t, 30, model, rng);
  const int before = ds.size();

  Eigen::VectorXi ind = Eigen::VectorXi::Zero(3);
  const Eigen::VectorXd psi = class_distribution(t, 4);

  // all indicators zero -> no change
  CHECK(sense_and_update(ds, 4, {1, 2}, ind, t, field, 100, model, rng) == 0);
  CHECK(ds.size() == before);

  ind[1] = 1;
  const int expect = arrivals({49, 1}, ind, psi, 100, field);
  const int added = sense_and_update(ds, 4, {49, 1}, ind, t, field, 100, model, rng);
  CHECK(added == expect);
  CHECK(ds.size() == before + added);
  for (int i = before; i < ds.size(); ++i) CHECK(ds.arrival_rounds()[i] == 4);
}

TEST_CASE("sensed labels follow the purity-weighted class distribution") {
  // chi-square against the designed multinomial across many seeded updates
  const FeatureModel model = FeatureModel::make(4, 8);
  SpatialField field;
  for (int c = 0; c < 4; ++c)
    field.clusters.push_back(
        {{40.0 * c - 60.0, 0.0}, Eigen::Matrix2d::Identity() * 64.0, 0.25});
  TemporalDistribution t;
  t.horizon = 8;
  t.mapping.resize(4, 4);
  Rng map_rng(21);
  for (int c = 0; c < 4; ++c)
    for (int k = 0; k < 4; ++k) t.mapping(c, k) = map_rng.uniform(-1, 1);

  const int assoc = 2;
  Eigen::VectorXi ind = Eigen::VectorXi::Zero(4);
  ind[assoc] = 1;
  const Eigen::VectorXd psi = class_distribution(t, 5);

  // dominant class gets 0.9, the rest splits 0.1 proportionally to psi
  Eigen::VectorXd design(4);
  const double other = psi.sum() - psi[assoc];
  for (int c = 0; c < 4; ++c)
    design[c] = c == assoc ? 0.9 : 0.1 * psi[c] / other;

  Eigen::VectorXd counts = Eigen::VectorXd::Zero(4);
  double total = 0.0;
  for (int seed = 0; seed < 1000; ++seed) {
    Rng rng(substream_seed(1234, "chi", seed));
    LocalDataset ds(0, 8);
    const int added = sense_and_update(ds, 5, field.clusters[assoc].mean, ind, t,
                                       field, 50, model, rng);
    total += added;
    for (int i = 0; i < ds.size(); ++i) counts[ds.labels()[i]] += 1.0;
  }
  double chi2 = 0.0;
  for (int c = 0; c < 4; ++c) {
    const double e = design[c] * total;
    chi2 += (counts[c] - e) * (counts[c] - e) / e;
  }
  // 3 degrees of freedom; 99.9% quantile is 16.27
  CHECK(chi2 < 16.27);
}

TEST_CASE("dataset generation is deterministic under a fixed seed") {
  const FeatureModel model = FeatureModel::make(4, 8);
  TemporalDistribution t = uniform_temporal(4, 6);
  Rng a(42), b(42);
  const LocalDataset da = init_dataset(0, t, 64, model, a);
  const LocalDataset db = init_dataset(0, t, 64, model, b);
  REQUIRE(da.size() == db.size());
  for (int i = 0; i < da.size(); ++i) {
    CHECK(da.labels()[i] == db.labels()[i]);
    CHECK(da.features().col(i) == db.features().col(i));
  }
}

TEST_CASE("synth_features matches the class mean when variance is zero") {
  const FeatureModel model = FeatureModel::make(3, 8, 2.0, 0.0);
  Rng rng(1);
  const Eigen::VectorXd x = synth_features(1, model, rng);
  CHECK((x - model.class_means.col(1)).norm() == 0.0);
}

TEST_CASE("synth_features empirical mean approaches the class mean") {
  const FeatureModel model = FeatureModel::make(3, 8);
  Rng rng(5);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(8);
  const int n = 10000;
  for (int i = 0; i < n; ++i) mean += synth_features(2, model, rng);
  mean /= n;
  const double tol = 4.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < 8; ++i)
    CHECK(std::abs(mean[i] - model.class_means(i, 2)) < tol);
}

TEST_CASE("well-separated classes admit a near-perfect centroid classifier") {
  const FeatureModel model = FeatureModel::make(2, 8, 4.0, 1.0);
  Rng rng(9);
  int correct = 0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    const Eigen::VectorXd x = synth_features(label, model, rng);
    const double d0 = (x - model.class_means.col(0)).squaredNorm();
    const double d1 = (x - model.class_means.col(1)).squaredNorm();
    correct += (d1 < d0 ? 1 : 0) == label ? 1 : 0;
  }
  CHECK(static_cast<double>(correct) / n > 0.95);
}

TEST_CASE("roi and field validation") {
  RoiConfig roi = test_roi();
  CHECK_NOTHROW(roi.validate());
  roi.gbs_position = {600, 0};
  CHECK_THROWS_AS(roi.validate(), std::invalid_argument);

  SpatialField f = single_cluster();
  f.clusters[0].weight = 0.5;
  CHECK_THROWS_AS(f.validate(test_roi()), std::invalid_argument);
}
