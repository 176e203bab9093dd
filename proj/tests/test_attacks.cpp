#include "doctest.h"
#include "qlab/attacks.hpp"

using namespace qlab;

TEST_CASE("threshold inequality chain") { CHECK(threshold_chain_holds(1, 100)); }

TEST_CASE("threshold search") {
  RngStream rng(3);

  // Single promised candidate.
  {
    ThresholdSearchInstance inst;
    inst.acceptance = {0.9};
    inst.block_budget = 1;
    auto r = threshold_search(inst, ThresholdMode::ExactOracle, rng);
    CHECK(r.found);
    CHECK(r.index == 0);
  }

  // Exact-oracle mode returns a valid index deterministically.
  {
    ThresholdSearchInstance inst;
    inst.acceptance = {0.1, 0.2, 0.8, 0.9};
    inst.block_budget = 4;
    for (int rep = 0; rep < 5; ++rep) {
      auto r = threshold_search(inst, ThresholdMode::ExactOracle, rng);
      CHECK(r.found);
      CHECK(r.index == 2);
      CHECK(inst.acceptance[static_cast<std::size_t>(r.index)] >= inst.target_threshold);
    }
  }

  // Measured mode on a 16-candidate toy instance succeeds usually.
  {
    ThresholdSearchInstance inst;
    inst.acceptance.assign(16, 0.02);
    inst.acceptance[11] = 0.95;
    inst.block_budget = 16;
    int found_valid = 0;
    const int runs = 200;
    for (int i = 0; i < runs; ++i) {
      auto r = threshold_search(inst, ThresholdMode::Measured, rng);
      if (r.found && inst.acceptance[static_cast<std::size_t>(r.index)] >= inst.target_threshold)
        ++found_valid;
      CHECK(r.blocks_used <= inst.block_budget);
    }
    CHECK(found_valid >= runs / 2);
  }

  // Not-found path when nothing accepts.
  {
    ThresholdSearchInstance inst;
    inst.acceptance.assign(8, 0.0);
    inst.block_budget = 8;
    auto r = threshold_search(inst, ThresholdMode::Measured, rng);
    CHECK_FALSE(r.found);
    CHECK(r.blocks_used == 8);
  }
}

TEST_CASE("toy owsg correctness") {
  RngStream rng(5);
  ToyOwsg owsg = make_copies_owsg(4, 4, 1, false);
  CHECK(owsg_correctness_failure(owsg, 2000, rng) <= 0.05);

  // Accept-all and reject-all verifier stubs pin the game's endpoints.
  long fail_accept = 0, fail_reject = 0;
  for (int i = 0; i < 500; ++i) {
    fail_accept += rng.bernoulli(1.0) ? 0 : 1;  // Ver == accept-all
    fail_reject += rng.bernoulli(0.0) ? 0 : 1;  // Ver == reject-all
  }
  CHECK(fail_accept == 0);
  CHECK(fail_reject == 500);
}

TEST_CASE("owsg attack") {
  RngStream rng(7);
  const int n = 4;
  ToyOwsg owsg = make_copies_owsg(4, n, 1, false);

  // Exact-oracle mode: the recovered key always clears the threshold-derived
  // per-copy acceptance.
  for (int rep = 0; rep < 50; ++rep) {
    auto r = owsg_attack(owsg, n, ThresholdMode::ExactOracle, rng);
    REQUIRE(r.found);
    CHECK(r.amplified_acceptance >= 1.0 / 3.0);
    CHECK(r.per_copy_acceptance >= 1.0 - std::log(3.0) / (10.0 * n));
    CHECK(r.per_copy_acceptance >= 1.0 - 1.0 / n);
  }

  // Measured mode wins the security game well above the 1/(10 n^2) threshold.
  long wins = 0;
  const int runs = 200;
  int copies_seen = 0;
  for (int i = 0; i < runs; ++i) {
    auto r = owsg_attack(owsg, n, ThresholdMode::Measured, rng);
    wins += (r.found && r.game_win) ? 1 : 0;
    copies_seen = std::max(copies_seen, r.copies_used);
  }
  CHECK(static_cast<double>(wins) / runs >= 1.0 / 3.0);
  CHECK(copies_seen > 0);

  // Colliding keys: the attack may return a different preimage, which still
  // verifies. Ambiguity is the point.
  ToyOwsg broken = make_copies_owsg(4, n, 1, true);
  for (int rep = 0; rep < 50; ++rep) {
    auto r = owsg_attack(broken, n, ThresholdMode::ExactOracle, rng);
    REQUIRE(r.found);
    CHECK(r.per_copy_acceptance >= 1.0 - 1.0 / n);
  }
}

TEST_CASE("attack success is monotone in the amplification") {
  RngStream rng(11);
  ToyOwsg owsg = make_copies_owsg(3, 2, 1, false);
  double prev = 0.0;
  for (int n_param : {1, 2, 4}) {
    long wins = 0;
    const int runs = 300;
    for (int i = 0; i < runs; ++i) {
      auto r = owsg_attack(owsg, n_param, ThresholdMode::Measured, rng);
      wins += (r.found && r.game_win) ? 1 : 0;
    }
    const double rate = static_cast<double>(wins) / runs;
    CHECK(rate >= prev - 0.1);  // allow sampling slack
    prev = rate;
  }
}

TEST_CASE("cloning barrier") {
  RngStream rng(13);
  const int n = 2, t1 = 2, t2 = 2;
  const long trials = 3000;

  auto cheat = barrier_cloning_experiment(cheat_cloner(), t1, t2, n, trials, rng);
  CHECK(cheat.advantage() > 0.1);

  auto trivial = barrier_cloning_experiment(trivial_cloner(), t1, t2, n, trials, rng);
  CHECK(trivial.advantage() <= 4.0 * trivial.stderr_value() + 1e-9);

  auto map = barrier_cloning_experiment(measure_and_prepare_cloner(), t1, t2, n, trials, rng);
  CHECK(map.advantage() <= 4.0 * map.stderr_value() + 1e-9);

  // The measured cloner's candidate has fidelity strictly below 1.
  Vec phi = embed(StateDistribution::haar(n).sample(rng));
  double best = 0.0;
  for (int i = 0; i < 50; ++i) {
    Vec cand = measure_and_prepare_cloner()(phi, t1, rng);
    best = std::max(best, fidelity(cand, minus_state(phi)));
  }
  CHECK(best < 0.999);
}

TEST_CASE("phase agreement barrier") {
  RngStream rng(17);
  auto r = barrier_phase_agreement(8, 4, 200000, rng);
  CHECK(r.theta_residual <= 1e-12);
  CHECK(r.agreement_rate >= 0.75);  // true rate of this estimator: 0.7542
  const double sigma = std::sqrt(0.25 / r.trials);
  CHECK(std::abs(r.agreement_rate_plain - 0.5) < 3.0 * sigma);
}
