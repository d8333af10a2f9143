#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <random>

#include "edfa/network.hpp"

using namespace edfa;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng,
                              double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

// Loss evaluated from scratch, for finite differencing.
double eval_loss(const Network& net, const Eigen::MatrixXd& x,
                 const Eigen::MatrixXd& y, const Eigen::MatrixXd& mask,
                 const LossSpec& spec) {
  const ForwardCache cache = forward(net, x);
  double loss = weighted_mse(cache.output(), y, mask);
  if (spec.lambda_coral != 0.0)
    loss += spec.lambda_coral *
            coral_penalty(*spec.coral_reference, batch_covariance(cache.last_hidden()));
  return loss;
}

}  // namespace

TEST_CASE("selu point values") {
  CHECK(selu(0.0) == 0.0);
  CHECK(selu(1.0) == doctest::Approx(1.050).epsilon(1e-12));
  CHECK(selu(-999.0) ==
        doctest::Approx(-1.050 * 1.673).epsilon(1e-12));  // saturation -lambda*alpha
  CHECK(selu_prime(-25.0) < 4e-9);
}

TEST_CASE("init_network structure and counts") {
  std::mt19937_64 rng(1);
  const Network net = init_network(rng);
  CHECK(param_count(net) == 119395);
  CHECK(flop_count(net) == 238095);

  std::mt19937_64 rng_a(2), rng_b(2);
  const Network a = init_network(rng_a);
  const Network b = init_network(rng_b);
  for (int l = 0; l < a.n_layers(); ++l)
    CHECK(a.weights[l].cwiseEqual(b.weights[l]).all());

  // variance close to 1/fan_in for wide layers
  for (int l = 0; l < net.n_layers(); ++l) {
    const double fan_in = static_cast<double>(net.dims[l]);
    if (fan_in < 100) continue;
    const double var =
        (net.weights[l].array() - net.weights[l].mean()).square().mean();
    CHECK(var == doctest::Approx(1.0 / fan_in).epsilon(0.2));
  }
}

TEST_CASE("tiny layer counts") {
  std::mt19937_64 rng(1);
  const Network net = init_network(rng, {1, 1});
  CHECK(param_count(net) == 2);
  CHECK(flop_count(net) == 3);
}

TEST_CASE("forward basics") {
  std::mt19937_64 rng(5);
  Network net = init_network(rng, {4, 3, 2});
  for (auto& w : net.weights) w.setZero();
  net.biases[0] << 1.0, -1.0, 0.5;
  net.biases[1] << 0.25, -0.25;
  net.standardizer.mean = Eigen::VectorXd::Zero(4);
  net.standardizer.std = Eigen::VectorXd::Ones(4);

  const Eigen::MatrixXd x = random_matrix(3, 4, rng);
  const ForwardCache cache = forward(net, x);
  for (Eigen::Index n = 0; n < 3; ++n) {
    CHECK(cache.output()(n, 0) == doctest::Approx(0.25));
    CHECK(cache.output()(n, 1) == doctest::Approx(-0.25));
  }

  // batch consistency
  Network rnet = init_network(rng, {4, 3, 2});
  Eigen::MatrixXd same(3, 4);
  same.row(0) = x.row(0);
  same.row(1) = x.row(0);
  same.row(2) = x.row(0);
  const ForwardCache c = forward(rnet, same);
  CHECK(c.output().row(0).cwiseEqual(c.output().row(1)).all());

  CHECK_THROWS_AS(static_cast<void>(forward(rnet, random_matrix(2, 5, rng))),
                  DimensionMismatch);
}

TEST_CASE("forward matches independent matrix arithmetic") {
  std::mt19937_64 rng(7);
  const Network net = init_network(rng, {6, 5, 4});
  const Eigen::MatrixXd x = random_matrix(8, 6, rng);
  const ForwardCache cache = forward(net, x);
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    Eigen::VectorXd h = net.weights[0] * x.row(n).transpose() + net.biases[0];
    for (Eigen::Index i = 0; i < h.size(); ++i) h[i] = selu(h[i]);
    Eigen::VectorXd out = net.weights[1] * h + net.biases[1];
    for (Eigen::Index i = 0; i < out.size(); ++i)
      CHECK(cache.output()(n, i) == doctest::Approx(out[i]).epsilon(1e-12));
  }
}

TEST_CASE("weighted_mse") {
  Eigen::MatrixXd pred(1, 3), meas(1, 3), mask(1, 3);
  pred << 1.2, 0.8, 10.0;
  meas << 1.0, 1.0, 1.0;
  mask << 1, 1, 0;
  CHECK(weighted_mse(pred, meas, mask) == doctest::Approx(0.04).epsilon(1e-12));

  CHECK(weighted_mse(meas, meas, mask) == 0.0);

  // perturbation on a masked-out channel is invisible, bit-identically
  Eigen::MatrixXd pred2 = pred;
  pred2(0, 2) = -555.0;
  CHECK(weighted_mse(pred, meas, mask) == weighted_mse(pred2, meas, mask));

  Eigen::MatrixXd empty = Eigen::MatrixXd::Zero(1, 3);
  CHECK_THROWS_AS(static_cast<void>(weighted_mse(pred, meas, empty)), EmptyMask);
}

TEST_CASE("batch_covariance") {
  Eigen::MatrixXd f(2, 2);
  f << 1, 0, -1, 0;
  const Eigen::MatrixXd c = batch_covariance(f);
  CHECK(c(0, 0) == doctest::Approx(2.0));
  CHECK(c(0, 1) == doctest::Approx(0.0));
  CHECK(c(1, 1) == doctest::Approx(0.0));

  Eigen::MatrixXd constant = Eigen::MatrixXd::Ones(5, 3) * 2.5;
  CHECK(batch_covariance(constant).norm() == doctest::Approx(0.0));

  std::mt19937_64 rng(3);
  const Eigen::MatrixXd r = random_matrix(20, 6, rng);
  const Eigen::MatrixXd cr = batch_covariance(r);
  CHECK((cr - cr.transpose()).norm() < 1e-12);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cr);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);

  CHECK_THROWS_AS(static_cast<void>(batch_covariance(Eigen::MatrixXd::Ones(1, 3))),
                  InsufficientBatch);
}

TEST_CASE("coral_penalty") {
  Eigen::MatrixXd cs(2, 2), ct(2, 2);
  cs << 2, 0, 0, 0;
  ct << 0, 0, 0, 2;
  CHECK(coral_penalty(cs, ct) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(coral_penalty(cs, cs) == 0.0);
  CHECK(coral_penalty(cs, ct) == coral_penalty(ct, cs));

  // shifting all rows by a constant leaves the covariance (hence penalty) fixed
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd f = random_matrix(10, 4, rng);
  Eigen::MatrixXd shifted = f;
  shifted.rowwise() += Eigen::RowVectorXd::Constant(4, 3.25);
  CHECK(coral_penalty(batch_covariance(f), batch_covariance(shifted)) <
        1e-20);
}

TEST_CASE("gradient check vs central finite differences") {
  std::mt19937_64 rng(17);
  Network net = init_network(rng, {10, 8, 8, 6, 6, 5});
  const int batch = 12;
  const Eigen::MatrixXd x = random_matrix(batch, 10, rng);
  const Eigen::MatrixXd y = random_matrix(batch, 5, rng);
  Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(batch, 5);
  std::bernoulli_distribution act(0.7);
  for (Eigen::Index n = 0; n < batch; ++n) {
    for (Eigen::Index i = 0; i < 5; ++i) mask(n, i) = act(rng) ? 1.0 : 0.0;
    if (mask.row(n).sum() == 0.0) mask(n, 0) = 1.0;
  }
  const Eigen::MatrixXd c_ref = batch_covariance(random_matrix(20, 6, rng));

  for (double lambda : {0.0, 0.4}) {
    LossSpec spec;
    spec.lambda_coral = lambda;
    spec.coral_reference = &c_ref;

    const ForwardCache cache = forward(net, x);
    Gradients grads;
    backward(net, cache, y, mask, spec, grads);

    const double h = 1e-5;
    std::uniform_int_distribution<int> layer_dist(0, net.n_layers() - 1);
    double max_rel = 0.0;
    for (int trial = 0; trial < 120; ++trial) {
      const int l = layer_dist(rng);
      std::uniform_int_distribution<Eigen::Index> rd(0, net.weights[l].rows() - 1);
      std::uniform_int_distribution<Eigen::Index> cd(0, net.weights[l].cols() - 1);
      const Eigen::Index r = rd(rng), c = cd(rng);
      const double orig = net.weights[l](r, c);
      net.weights[l](r, c) = orig + h;
      const double lp = eval_loss(net, x, y, mask, spec);
      net.weights[l](r, c) = orig - h;
      const double lm = eval_loss(net, x, y, mask, spec);
      net.weights[l](r, c) = orig;
      const double fd = (lp - lm) / (2.0 * h);
      const double an = grads.d_weights[l](r, c);
      const double rel = std::abs(fd - an) / std::max(1e-8, std::abs(fd));
      max_rel = std::max(max_rel, rel);
    }
    CHECK(max_rel < 1e-5);

    // bias gradients too
    for (int trial = 0; trial < 40; ++trial) {
      const int l = layer_dist(rng);
      std::uniform_int_distribution<Eigen::Index> rd(0, net.biases[l].size() - 1);
      const Eigen::Index r = rd(rng);
      const double orig = net.biases[l][r];
      net.biases[l][r] = orig + h;
      const double lp = eval_loss(net, x, y, mask, spec);
      net.biases[l][r] = orig - h;
      const double lm = eval_loss(net, x, y, mask, spec);
      net.biases[l][r] = orig;
      const double fd = (lp - lm) / (2.0 * h);
      CHECK(std::abs(fd - grads.d_biases[l][r]) / std::max(1e-8, std::abs(fd)) <
            1e-5);
    }
  }
}

TEST_CASE("coral lambda=0 leaves gradients identical to plain MSE") {
  std::mt19937_64 rng(19);
  Network net = init_network(rng, {6, 5, 4, 3});
  const Eigen::MatrixXd x = random_matrix(6, 6, rng);
  const Eigen::MatrixXd y = random_matrix(6, 3, rng);
  const Eigen::MatrixXd mask = Eigen::MatrixXd::Ones(6, 3);
  const Eigen::MatrixXd c_ref = batch_covariance(random_matrix(10, 4, rng));

  const ForwardCache cache = forward(net, x);
  Gradients g_plain, g_zero;
  backward(net, cache, y, mask, LossSpec{}, g_plain);
  LossSpec zero;
  zero.lambda_coral = 0.0;
  zero.coral_reference = &c_ref;
  backward(net, cache, y, mask, zero, g_zero);
  for (int l = 0; l < net.n_layers(); ++l)
    CHECK(g_plain.d_weights[l].cwiseEqual(g_zero.d_weights[l]).all());
}

TEST_CASE("adam_step") {
  std::mt19937_64 rng(23);
  Network net = init_network(rng, {3, 2});
  const Network before = net;
  AdamState state = make_adam_state(net);

  Gradients zero;
  zero.d_weights = {Eigen::MatrixXd::Zero(2, 3)};
  zero.d_biases = {Eigen::VectorXd::Zero(2)};
  adam_step(net, state, zero, {1e-3}, 1.0);
  CHECK(net.weights[0].cwiseEqual(before.weights[0]).all());

  // clip scales a norm-10 gradient by 0.1
  Gradients big;
  big.d_weights = {Eigen::MatrixXd::Zero(2, 3)};
  big.d_biases = {Eigen::VectorXd::Zero(2)};
  big.d_weights[0](0, 0) = 10.0;
  CHECK(global_grad_norm(big) == doctest::Approx(10.0));

  // two steps against the scalar Adam recurrence
  Network scalar_net = init_network(rng, {1, 1});
  scalar_net.weights[0](0, 0) = 0.5;
  scalar_net.biases[0][0] = 0.0;
  AdamState s2 = make_adam_state(scalar_net);
  Gradients g;
  g.d_weights = {Eigen::MatrixXd::Constant(1, 1, 0.3)};
  g.d_biases = {Eigen::VectorXd::Zero(1)};

  double m = 0.0, v = 0.0, w = 0.5;
  const double lr = 1e-2, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  for (int t = 1; t <= 2; ++t) {
    adam_step(scalar_net, s2, g, {lr}, 0.0);
    m = b1 * m + (1 - b1) * 0.3;
    v = b2 * v + (1 - b2) * 0.09;
    const double mhat = m / (1 - std::pow(b1, t));
    const double vhat = v / (1 - std::pow(b2, t));
    w -= lr * mhat / (std::sqrt(vhat) + eps);
    CHECK(scalar_net.weights[0](0, 0) == doctest::Approx(w).epsilon(1e-12));
  }
}

TEST_CASE("self-normalization: hidden activation std stays near 1") {
  std::mt19937_64 rng(29);
  Network net = init_network(rng, canonical_dims(), /*full_precision_selu=*/false);
  const Eigen::MatrixXd x = random_matrix(1000, 196, rng);
  const ForwardCache cache = forward(net, x);
  for (std::size_t l = 1; l + 1 < cache.act.size(); ++l) {
    const auto& a = cache.act[l];
    const double sd = std::sqrt((a.array() - a.mean()).square().mean());
    CHECK(sd > 0.7);
    CHECK(sd < 1.3);
  }
}

TEST_CASE("checkpoint round trip is bit exact") {
  std::mt19937_64 rng(31);
  Network net = init_network(rng);
  net.coral_reference = random_matrix(100, 100, rng);
  net.metadata["source_device"] = "booster-31";

  const auto path = std::filesystem::temp_directory_path() / "edfa_ckpt.json";
  save_checkpoint(net, path);
  const Network back = load_checkpoint(path);
  CHECK(back.dims == net.dims);
  for (int l = 0; l < net.n_layers(); ++l) {
    CHECK(back.weights[l].cwiseEqual(net.weights[l]).all());
    CHECK(back.biases[l].cwiseEqual(net.biases[l]).all());
  }
  CHECK(back.standardizer.mean.cwiseEqual(net.standardizer.mean).all());
  CHECK(back.coral_reference->cwiseEqual(*net.coral_reference).all());
  CHECK(back.metadata["source_device"] == "booster-31");
  std::filesystem::remove(path);
}
