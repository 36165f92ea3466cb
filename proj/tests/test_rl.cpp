#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "flowcritic/common/errors.hpp"
#include "flowcritic/common/rng.hpp"
#include "flowcritic/rl/config.hpp"
#include "flowcritic/rl/critics.hpp"
#include "flowcritic/rl/policy.hpp"
#include "flowcritic/rl/ppo.hpp"
#include "flowcritic/rl/returns.hpp"
#include "flowcritic/rl/rollout.hpp"
#include "flowcritic/rl/trainer.hpp"
#include "support/reference_ppo.hpp"

using namespace flowcritic;
using namespace flowcritic::rl;

TEST_CASE("config: validation catches bad ranges") {
  TrainConfig cfg;
  cfg.num_envs = 4;
  cfg.rollout_len = 4;
  cfg.minibatch_size = 8;
  CHECK_NOTHROW(cfg.validate());

  TrainConfig bad = cfg;
  bad.gamma = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.truncation = bad.n_value_samples;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.minibatch_size = 99;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.lambda = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("config: JSON round-trip and unknown-key rejection") {
  TrainConfig cfg;
  cfg.env_name = "pendulum";
  cfg.critic_kind = CriticKind::kQuantile;
  cfg.seed = 123;
  cfg.cov_temperature = 0.05;
  cfg.actor_hidden = {32, 32};

  const TrainConfig back = TrainConfig::from_json_string(cfg.to_json_string());
  CHECK(back.env_name == cfg.env_name);
  CHECK(back.critic_kind == cfg.critic_kind);
  CHECK(back.seed == cfg.seed);
  CHECK(back.cov_temperature == cfg.cov_temperature);
  CHECK(back.actor_hidden == cfg.actor_hidden);

  CHECK_THROWS_AS(TrainConfig::from_json_string("{\"gama\": 0.9}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(critic_kind_from_string("pointy"), std::invalid_argument);
}

TEST_CASE("dist_td_sample: arithmetic, terminal, fixed point") {
  CHECK(dist_td_sample(1.0, 0.99, 2.0, 1.0) == doctest::Approx(1.98));
  CHECK(dist_td_sample(1.0, 0.99, 0.0, 0.0) == doctest::Approx(1.0));
  CHECK(dist_td_sample(0.0, 0.99, 1.0, 0.99) == doctest::Approx(0.0));
}

TEST_CASE("dist_return_target: telescoping and one-step limits") {
  const std::vector<std::uint8_t> open = {0, 0};

  // Last step: z_hat = zeta + z_cur.
  {
    const std::vector<double> zeta = {0.7};
    const std::vector<double> z = {2.0};
    const std::vector<std::uint8_t> boundary = {0};
    const auto target = dist_return_target(zeta, boundary, 0.9405, z);
    CHECK(target[0] == doctest::Approx(2.7));
  }

  // lambda = 0 collapses to the one-step target for every t.
  {
    const std::vector<double> zeta = {0.5, -0.25};
    const std::vector<double> z = {1.0, 2.0};
    const auto target = dist_return_target(zeta, open, 0.0, z);
    CHECK(target[0] == doctest::Approx(1.5));
    CHECK(target[1] == doctest::Approx(1.75));
  }

  // Hand-evaluated discounted sum.
  {
    const std::vector<double> zeta = {1.0, 1.0};
    const std::vector<double> z = {0.0, 0.0};
    const auto target = dist_return_target(zeta, open, 0.9405, z);
    CHECK(target[0] == doctest::Approx(1.9405));
    CHECK(target[1] == doctest::Approx(1.0));
  }
}

TEST_CASE("gae_advantages: examples from first principles") {
  // Single step, r=1, V == 0 everywhere.
  {
    const std::vector<double> r = {1.0}, v = {0.0}, nv = {0.0};
    const std::vector<std::uint8_t> d = {1}, tr = {0};
    const auto adv = gae_advantages(r, v, nv, d, tr, 0.99, 0.95);
    CHECK(adv[0] == doctest::Approx(1.0));
  }

  // Constant reward with V at the fixed point r/(1-gamma): all deltas zero.
  {
    const double gamma = 0.9;
    const double vstar = 1.0 / (1.0 - gamma);
    const std::vector<double> r(6, 1.0), v(6, vstar), nv(6, vstar);
    const std::vector<std::uint8_t> d(6, 0), tr(6, 0);
    const auto adv = gae_advantages(r, v, nv, d, tr, gamma, 0.95);
    for (double a : adv) CHECK(a == doctest::Approx(0.0));
  }

  // deltas {1, 1} with gamma*lambda = 0.9405.
  {
    const std::vector<double> r = {1.0, 1.0}, v = {0.0, 0.0}, nv = {0.0, 0.0};
    const std::vector<std::uint8_t> d = {0, 0}, tr = {0, 0};
    const auto adv = gae_advantages(r, v, nv, d, tr, 0.99, 0.95);
    CHECK(adv[0] == doctest::Approx(1.9405));
    CHECK(adv[1] == doctest::Approx(1.0));
  }
}

TEST_CASE("gae_advantages: a done flag blocks reward leakage") {
  Rng rng(3, 0);
  const int T = 12;
  std::vector<double> r(T), v(T), nv(T);
  std::vector<std::uint8_t> d(T, 0), tr(T, 0);
  for (int t = 0; t < T; ++t) {
    r[t] = rng.gaussian();
    v[t] = rng.gaussian();
    nv[t] = rng.gaussian();
  }
  const int j = 5;
  d[j] = 1;
  nv[j] = 0.0;
  const auto before = gae_advantages(r, v, nv, d, tr, 0.99, 0.95);

  // Perturbing everything after the boundary leaves t <= j untouched.
  auto r2 = r;
  auto nv2 = nv;
  for (int t = j + 1; t < T; ++t) {
    r2[t] += 100.0 * rng.gaussian();
    nv2[t] += 100.0 * rng.gaussian();
  }
  const auto after = gae_advantages(r2, v, nv2, d, tr, 0.99, 0.95);
  for (int t = 0; t <= j; ++t) CHECK(before[t] == after[t]);
}

TEST_CASE("empirical_return_target") {
  CHECK(empirical_return_target(1.9405, 0.0) == doctest::Approx(1.9405));
  CHECK(empirical_return_target(0.0, 5.0) == doctest::Approx(5.0));
  // gamma = lambda = 1 with no bootstrap: plain reward sum.
  const std::vector<double> r = {1.0, 2.0, 3.0}, v(3, 0.0), nv(3, 0.0);
  const std::vector<std::uint8_t> d = {0, 0, 1}, tr(3, 0);
  const auto adv = gae_advantages(r, v, nv, d, tr, 1.0, 1.0);
  CHECK(empirical_return_target(adv[0], v[0]) == doctest::Approx(6.0));
}

TEST_CASE("ppo surrogate: clipped branches") {
  CHECK(ppo_surrogate(1.0, 1.0, 0.2) == doctest::Approx(1.0));
  CHECK(ppo_surrogate(1.5, 1.0, 0.2) == doctest::Approx(1.2));
  CHECK(ppo_surrogate(0.5, -1.0, 0.2) == doctest::Approx(-0.8));

  // Pessimism of the min: the surrogate never exceeds the raw
  // importance-weighted advantage, for either advantage sign.
  Rng rng(5, 0);
  for (int i = 0; i < 500; ++i) {
    const double ratio = std::exp(rng.uniform(-1.5, 1.5));
    const double adv = 3.0 * rng.gaussian();
    const double surr = ppo_surrogate(ratio, adv, 0.2);
    CHECK(surr <= ratio * adv + 1e-12);
    const double clipped = std::clamp(ratio, 0.8, 1.2) * adv;
    CHECK(surr <= clipped + 1e-12);
  }
}

TEST_CASE("weighted_ppo_objective: identity ratio recovers mean(w * A)") {
  GaussianPolicy policy(3, 2, {8});
  Rng init(7, 0);
  policy.init(init);

  RolloutBuffer buf;
  buf.num_envs = 1;
  buf.rollout_len = 4;
  buf.obs_dim = 3;
  buf.action_dim = 2;
  Rng rng(8, 0);
  for (int i = 0; i < 4; ++i) {
    for (int d = 0; d < 3; ++d) buf.states.push_back(rng.gaussian());
    const auto obs = std::span<const double>(buf.states).last(3);
    double logp = 0.0;
    const auto a = policy.sample_action(obs, rng, &logp);
    buf.actions.insert(buf.actions.end(), a.begin(), a.end());
    buf.log_probs.push_back(logp);
  }
  buf.advantages = {1.0, -2.0, 0.5, 3.0};
  buf.weights = {1.0, 1.0, 1.0, 1.0};

  const std::vector<int> idx = {0, 1, 2, 3};
  const double objective =
      weighted_ppo_objective(policy, buf, idx, 0.2, 0.0);
  CHECK(objective == doctest::Approx((1.0 - 2.0 + 0.5 + 3.0) / 4.0));

  buf.weights = {2.0, 0.5, 1.0, 0.5};
  const double weighted =
      weighted_ppo_objective(policy, buf, idx, 0.2, 0.0);
  CHECK(weighted ==
        doctest::Approx((2.0 * 1.0 + 0.5 * -2.0 + 0.5 + 0.5 * 3.0) / 4.0));
}

TEST_CASE("weighted_ppo_objective: non-finite ratio raises a numeric error") {
  GaussianPolicy policy(2, 1, {4});
  Rng init(9, 0);
  policy.init(init);
  RolloutBuffer buf;
  buf.num_envs = 1;
  buf.rollout_len = 1;
  buf.obs_dim = 2;
  buf.action_dim = 1;
  buf.states = {0.1, 0.2};
  buf.actions = {0.3};
  buf.log_probs = {-2000.0};  // exp(logp_new + 2000) overflows
  buf.advantages = {1.0};
  buf.weights = {1.0};
  const std::vector<int> idx = {0};
  CHECK_THROWS_AS(
      (void)weighted_ppo_objective(policy, buf, idx, 0.2, 0.0),
      NumericError);
}

TEST_CASE("policy: log-prob gradient matches finite differences") {
  GaussianPolicy policy(3, 2, {8, 8});
  Rng init(11, 0);
  policy.init(init);
  policy.log_std() = {0.3, -0.2};

  Rng rng(12, 0);
  const std::vector<double> obs = {rng.gaussian(), rng.gaussian(),
                                   rng.gaussian()};
  const std::vector<double> action = {rng.gaussian(), rng.gaussian()};

  nn::ForwardTrace trace;
  (void)policy.log_prob_traced(obs, action, trace);
  policy.zero_grad();
  policy.accumulate_log_prob_grad(trace, action, 1.0);

  const double h = 1e-6;
  auto params = policy.mean_net().params();
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double saved = params[p];
    params[p] = saved + h;
    const double up = policy.log_prob(obs, action);
    params[p] = saved - h;
    const double down = policy.log_prob(obs, action);
    params[p] = saved;
    const double fd = (up - down) / (2.0 * h);
    worst = std::max(worst,
                     std::abs(fd - policy.mean_net().grads()[p]) /
                         std::max({std::abs(fd), 1e-3}));
  }
  CHECK(worst < 1e-4);

  for (int d = 0; d < 2; ++d) {
    const double saved = policy.log_std()[d];
    policy.log_std()[d] = saved + h;
    const double up = policy.log_prob(obs, action);
    policy.log_std()[d] = saved - h;
    const double down = policy.log_prob(obs, action);
    policy.log_std()[d] = saved;
    const double fd = (up - down) / (2.0 * h);
    CHECK(fd == doctest::Approx(policy.log_std_grad()[d]).epsilon(1e-5));
  }
}

TEST_CASE("quantile critic: midpoints, zero loss, asymmetric slope") {
  CHECK(quantile_midpoints(2) == std::vector<double>{0.25, 0.75});

  // A critic whose outputs all equal the target has zero loss: zero net
  // with output biases set to the target value.
  QuantileCritic critic(2, {4}, 3, 1.0);
  auto params = critic.net().params();
  // Layer 0: 4x2 weights + 4 biases; layer 1: 3x4 weights + 3 biases.
  const std::size_t bias_off = 4 * 2 + 4 + 3 * 4;
  params[bias_off + 0] = params[bias_off + 1] = params[bias_off + 2] = 1.7;
  const std::vector<double> obs = {0.4, -0.4};
  CHECK(quantile_regression_loss(critic, obs, 1.7) == doctest::Approx(0.0));
  CHECK(critic.value(obs) == doctest::Approx(1.7));

  // Single quantile at tau = 0.5: slope 0.5 per unit |u| in both tails.
  QuantileCritic single(2, {4}, 1, 1.0);
  const double above = quantile_regression_loss(single, obs, 10.0) -
                       quantile_regression_loss(single, obs, 9.0);
  const double below = quantile_regression_loss(single, obs, -10.0) -
                       quantile_regression_loss(single, obs, -9.0);
  CHECK(above == doctest::Approx(0.5));
  CHECK(below == doctest::Approx(0.5));
}

TEST_CASE("ensemble critic: aggregate modes and ordering") {
  // Five constant nets outputting 1..5 via their output bias.
  std::vector<nn::Mlp> members;
  for (int j = 0; j < 5; ++j) {
    nn::Mlp net({2, 3, 1}, nn::Activation::kRelu);
    net.params()[net.param_count() - 1] = 1.0 + j;
    members.push_back(std::move(net));
  }
  const std::vector<double> obs = {0.0, 0.0};
  CHECK(ensemble_value(members, obs, EnsembleMode::kAverage) ==
        doctest::Approx(3.0));
  CHECK(ensemble_value(members, obs, EnsembleMode::kMinimum) ==
        doctest::Approx(1.0));

  // All-equal members agree in both modes.
  std::vector<nn::Mlp> same;
  for (int j = 0; j < 5; ++j) {
    nn::Mlp net({2, 3, 1}, nn::Activation::kRelu);
    net.params()[net.param_count() - 1] = 3.0;
    same.push_back(std::move(net));
  }
  CHECK(ensemble_value(same, obs, EnsembleMode::kAverage) ==
        doctest::Approx(3.0));
  CHECK(ensemble_value(same, obs, EnsembleMode::kMinimum) ==
        doctest::Approx(3.0));

  Rng rng(13, 0);
  for (int trial = 0; trial < 50; ++trial) {
    EnsembleCritic ensemble(2, {6}, 5, EnsembleMode::kAverage);
    ensemble.init(rng);
    const std::vector<double> x = {rng.gaussian(), rng.gaussian()};
    CHECK(ensemble_value(ensemble.members(), x, EnsembleMode::kMinimum) <=
          ensemble_value(ensemble.members(), x, EnsembleMode::kAverage) +
              1e-12);
  }
}

TEST_CASE("collect_rollouts: shapes, determinism, single-step buffers") {
  const std::uint64_t seed = 21;
  auto collect = [&](int T) {
    envs::VecEnv venv("pointmass", 3, seed);
    GaussianPolicy policy(4, 2, {8});
    Rng init(seed, streams::kPolicyInit);
    policy.init(init);
    std::vector<Rng> rngs;
    for (int k = 0; k < 3; ++k)
      rngs.emplace_back(seed, Rng::mix(streams::kAction, static_cast<std::uint64_t>(k)));
    return collect_rollouts(venv, policy, T, rngs);
  };

  const auto one = collect(1);
  CHECK(one.size() == 3);
  CHECK(one.states.size() == 3 * 4);

  const auto a = collect(6);
  const auto b = collect(6);
  CHECK(a.states == b.states);
  CHECK(a.actions == b.actions);
  CHECK(a.rewards == b.rewards);
  CHECK(a.log_probs == b.log_probs);
}

TEST_CASE("trainer: fixed seed gives bit-identical metric traces") {
  TrainConfig cfg;
  cfg.env_name = "pointmass";
  cfg.critic_kind = CriticKind::kFlow;
  cfg.seed = 5;
  cfg.num_envs = 4;
  cfg.rollout_len = 8;
  cfg.epochs = 2;
  cfg.minibatches = 2;
  cfg.minibatch_size = 16;
  cfg.n_value_samples = 4;
  cfg.truncation = 1;
  cfg.actor_hidden = {8, 8};
  cfg.critic_hidden = {8, 8};

  auto run = [&] {
    Trainer trainer(cfg);
    std::vector<IterationMetrics> out;
    for (int i = 0; i < 2; ++i) out.push_back(trainer.run_iteration());
    return out;
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::memcmp(&a[i], &b[i], sizeof(IterationMetrics)) == 0);
  }
}

TEST_CASE("trainer: alpha = 0 with a point critic reduces to reference PPO") {
  testing::ReferencePpoSettings ref;
  ref.env_name = "pointmass";
  ref.seed = 31;
  ref.num_envs = 4;
  ref.rollout_len = 8;
  ref.epochs = 2;
  ref.minibatches = 2;
  ref.actor_hidden = {16, 16};
  ref.critic_hidden = {16, 16};

  TrainConfig cfg;
  cfg.env_name = ref.env_name;
  cfg.critic_kind = CriticKind::kPoint;
  cfg.cov_temperature = 0.0;
  cfg.seed = ref.seed;
  cfg.num_envs = ref.num_envs;
  cfg.rollout_len = ref.rollout_len;
  cfg.epochs = ref.epochs;
  cfg.minibatches = ref.minibatches;
  cfg.minibatch_size = 16;
  cfg.actor_hidden = ref.actor_hidden;
  cfg.critic_hidden = ref.critic_hidden;

  const auto expected = testing::run_reference_ppo(ref, 4);
  Trainer trainer(cfg);
  for (int i = 0; i < 4; ++i) {
    const IterationMetrics m = trainer.run_iteration();
    INFO("iteration ", i);
    CHECK(m.ep_return_mean == expected[i].ep_return_mean);
    CHECK(m.critic_loss == expected[i].critic_loss);
    CHECK(m.policy_objective == expected[i].policy_objective);
    CHECK(m.policy_grad_norm == expected[i].policy_grad_norm);
    CHECK(m.critic_grad_norm == expected[i].critic_grad_norm);
    CHECK(m.kappa_mean == 0.0);
    CHECK(m.weight_mean == 1.0);
  }
}

TEST_CASE("trainer: a huge alpha suppresses the noisiest state") {
  // Weight mechanics at the operation level: one high-CoV state among
  // uniform ones loses essentially all of its mass under a large alpha.
  std::vector<double> kappa = {0.1, 0.1, 0.1, 5.0};
  std::vector<double> raw(kappa.size());
  for (std::size_t i = 0; i < kappa.size(); ++i)
    raw[i] = flow::cov_weight(kappa[i], 50.0);
  const auto weights = flow::normalize_weights(raw);
  CHECK(weights[3] < 1e-9);
  CHECK(weights[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("trainer: flow iteration runs end to end on the toy env") {
  TrainConfig cfg;
  cfg.env_name = "toy_single_step";
  cfg.critic_kind = CriticKind::kFlow;
  cfg.seed = 3;
  cfg.num_envs = 8;
  cfg.rollout_len = 2;
  cfg.epochs = 2;
  cfg.minibatches = 2;
  cfg.minibatch_size = 8;
  cfg.n_value_samples = 4;
  cfg.truncation = 1;
  cfg.actor_hidden = {8};
  cfg.critic_hidden = {16, 16};

  Trainer trainer(cfg);
  const auto m = trainer.run_iteration();
  CHECK_FALSE(m.aborted);
  CHECK(m.kappa_mean > 0.0);
  CHECK(m.weight_mean == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(m.env_steps == 16);
  CHECK(std::isfinite(m.critic_loss));
}
