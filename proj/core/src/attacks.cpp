#include "qlab/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace qlab {

// ---------------------------------------------------------------------------
// ToyOwsg
// ---------------------------------------------------------------------------

Vec ToyOwsg::ancilla(int key) const {
  const int keys = key_count();
  int effective = key;
  if (colliding_keys) effective = key % (keys / 2);  // pairs of keys share an angle
  const double denom = colliding_keys ? keys / 2 : keys;
  const double theta = 0.5 * std::numbers::pi * effective / denom;
  Vec a(2);
  a << std::cos(theta), std::sin(theta);
  return a;
}

double ToyOwsg::per_copy_accept(int candidate, int key) const {
  // Symmetric-subspace test on identical oracle copies accepts with
  // probability 1; the ancilla projector contributes the overlap.
  return fidelity(ancilla(candidate), ancilla(key));
}

ToyOwsg make_copies_owsg(int key_bits, int n, int verify_copies, bool colliding_keys) {
  ToyOwsg o;
  o.name = colliding_keys ? "copies-owsg-colliding" : "copies-owsg";
  o.key_bits = key_bits;
  o.n = n;
  o.verify_copies = verify_copies;
  o.colliding_keys = colliding_keys;
  return o;
}

double owsg_correctness_failure(const ToyOwsg& owsg, long trials, RngStream& rng) {
  long failures = 0;
  for (long t = 0; t < trials; ++t) {
    const int k = static_cast<int>(rng.uniform_below(owsg.key_count()));
    failures += rng.bernoulli(owsg.per_copy_accept(k, k)) ? 0 : 1;
  }
  return static_cast<double>(failures) / trials;
}

// ---------------------------------------------------------------------------
// Threshold search
// ---------------------------------------------------------------------------

ThresholdResult threshold_search(const ThresholdSearchInstance& instance, ThresholdMode mode,
                                 RngStream& rng) {
  const int m = static_cast<int>(instance.acceptance.size());
  ThresholdResult result;
  if (m == 0) return result;

  if (mode == ThresholdMode::ExactOracle) {
    for (int i = 0; i < m; ++i) {
      if (instance.acceptance[static_cast<std::size_t>(i)] >= instance.target_threshold) {
        result.found = true;
        result.index = i;
        return result;
      }
    }
    return result;
  }

  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int i : order) {
    if (result.blocks_used >= instance.block_budget) return result;
    ++result.blocks_used;
    if (rng.bernoulli(instance.acceptance[static_cast<std::size_t>(i)])) {
      result.found = true;
      result.index = i;
      return result;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// OWSG attack
// ---------------------------------------------------------------------------

OwsgAttackResult owsg_attack(const ToyOwsg& owsg, int n_param, ThresholdMode mode,
                             RngStream& rng) {
  const int amplification = 10 * n_param;
  const int keys = owsg.key_count();
  const int k = static_cast<int>(rng.uniform_below(keys));

  ThresholdSearchInstance instance;
  instance.block_budget = keys;  // simple sequential variant: one block per candidate
  for (int cand = 0; cand < keys; ++cand)
    instance.acceptance.push_back(
        std::pow(owsg.per_copy_accept(cand, k), amplification));

  ThresholdResult ts = threshold_search(instance, mode, rng);
  OwsgAttackResult out;
  out.copies_used = ts.blocks_used * amplification * (1 + owsg.verify_copies);
  if (!ts.found) return out;
  out.found = true;
  out.recovered_key = ts.index;
  out.amplified_acceptance = instance.acceptance[static_cast<std::size_t>(ts.index)];
  out.per_copy_acceptance = owsg.per_copy_accept(ts.index, k);
  out.game_win = rng.bernoulli(out.per_copy_acceptance);
  return out;
}

bool threshold_chain_holds(int n_min, int n_max) {
  for (int n = n_min; n <= n_max; ++n) {
    const double r = 10.0 * n;
    const double lhs = std::pow(3.0, -1.0 / r);
    const double mid = 1.0 - std::log(3.0) / r;
    const double low = 1.0 - 1.0 / n;
    if (!(lhs >= mid && mid >= low)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Barrier: cloning
// ---------------------------------------------------------------------------

Cloner trivial_cloner() {
  return [](const Vec& phi_embedded, int, RngStream&) {
    return flag_vector(phi_embedded.size());
  };
}

Cloner cheat_cloner() {
  return [](const Vec& phi_embedded, int, RngStream&) { return minus_state(phi_embedded); };
}

Cloner measure_and_prepare_cloner() {
  return [](const Vec& phi_embedded, int, RngStream& rng) {
    // Computational-basis measurement of one copy, then prepare the minus
    // state of the observed basis vector.
    double u = rng.uniform();
    Eigen::Index idx = phi_embedded.size() - 1;
    for (Eigen::Index i = 0; i < phi_embedded.size(); ++i) {
      const double p = std::norm(phi_embedded(i));
      if (u < p) {
        idx = i;
        break;
      }
      u -= p;
    }
    if (idx == 0) return flag_vector(phi_embedded.size());
    return minus_state(Vec(Vec::Unit(phi_embedded.size(), idx)));
  };
}

AdvantageEstimate barrier_cloning_experiment(const Cloner& cloner, int t1, int t2, int n,
                                             long trials, RngStream& rng) {
  if (t2 < 1) throw std::invalid_argument("barrier_cloning_experiment: t2 must be >= 1");
  long rep_hits = 0, minus_hits = 0;
  for (long t = 0; t < trials; ++t) {
    // Shared-count world: the last register is one slot of a Rep state.
    {
      const Vec phi = embed(sample_haar(n, rng).amplitudes());
      const Vec candidate = cloner(phi, t1, rng);
      const int c = sample_binomial(t2, rng).count;
      const Vec rep = rep_state(t2, c, phi);
      RegisterLayout lay(std::vector<Eigen::Index>(static_cast<std::size_t>(t2), phi.size()));
      const std::size_t last[1] = {static_cast<std::size_t>(t2 - 1)};
      Mat red = reduced_density(rep, lay, std::span<const std::size_t>(last, 1));
      const double accept =
          0.5 * (1.0 + std::real((candidate.adjoint() * red * candidate)(0, 0)));
      rep_hits += rng.bernoulli(std::clamp(accept, 0.0, 1.0)) ? 1 : 0;
    }
    // Product world: the last register is |phi-> itself.
    {
      const Vec phi = embed(sample_haar(n, rng).amplitudes());
      const Vec candidate = cloner(phi, t1, rng);
      const Vec minus = minus_state(phi);
      const double accept = swap_test(candidate, minus);
      minus_hits += rng.bernoulli(std::clamp(accept, 0.0, 1.0)) ? 1 : 0;
    }
  }
  return AdvantageEstimate{static_cast<double>(rep_hits) / trials,
                           static_cast<double>(minus_hits) / trials, trials};
}

// ---------------------------------------------------------------------------
// Barrier: phase agreement
// ---------------------------------------------------------------------------

namespace {

// One party's estimate: split the swap-test budget between the two antipodal
// grid candidates 0 and grid/2 (they carry the whole cosine signal; spending
// tests on the quadrature points only adds noise at this budget), then output
// the sign of the count difference. Ties fall back to a fair coin so that
// pure noise yields an unbiased bit.
int phase_party_bit(double theta, int tests, int grid, bool minus_access, RngStream& rng) {
  const int per = std::max(1, tests / 2);
  double score = 0.0;
  for (int candidate : {0, grid / 2}) {
    const double grid_theta = 2.0 * std::numbers::pi * candidate / grid;
    // Swap-test acceptance of a copy against the grid candidate.
    double overlap;
    if (minus_access) {
      // |<g | phi->|^2 = cos^2((theta - grid_theta)/2)
      const double half = 0.5 * (theta - grid_theta);
      overlap = std::cos(half) * std::cos(half);
    } else {
      // plain copies e^{i theta}|1>: overlap with the embedded grid state is
      // phase-independent
      overlap = 0.5;
    }
    const double accept = 0.5 * (1.0 + overlap);
    int hits = 0;
    for (int i = 0; i < per; ++i) hits += rng.bernoulli(accept) ? 1 : 0;
    score += hits * std::cos(grid_theta);
  }
  if (score > 1e-12) return 0;
  if (score < -1e-12) return 1;
  return rng.bernoulli(0.5) ? 1 : 0;
}

}  // namespace

PhaseAgreementResult barrier_phase_agreement(int swap_tests_per_party, int grid, long trials,
                                             RngStream& rng) {
  if (grid < 2) throw std::invalid_argument("barrier_phase_agreement: grid must be >= 2");
  PhaseAgreementResult out;
  out.trials = trials;

  long agree_minus = 0, agree_plain = 0;
  for (long t = 0; t < trials; ++t) {
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    const int a = phase_party_bit(theta, swap_tests_per_party, grid, true, rng);
    const int b = phase_party_bit(theta, swap_tests_per_party, grid, true, rng);
    agree_minus += (a == b) ? 1 : 0;
    const int ap = phase_party_bit(theta, swap_tests_per_party, grid, false, rng);
    const int bp = phase_party_bit(theta, swap_tests_per_party, grid, false, rng);
    agree_plain += (ap == bp) ? 1 : 0;
  }
  out.agreement_rate = static_cast<double>(agree_minus) / trials;
  out.agreement_rate_plain = static_cast<double>(agree_plain) / trials;

  // Density operators of t copies of e^{i theta}|1> are literally identical;
  // measure the residual over a phase grid.
  const int copies = 3;
  double residual = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double ti = 2.0 * std::numbers::pi * i / 4.0;
      const double tj = 2.0 * std::numbers::pi * j / 4.0;
      Vec one = Vec::Unit(2, 1);
      Vec a = std::exp(Cx(0, ti)) * one;
      Vec b = std::exp(Cx(0, tj)) * one;
      Vec ka = Vec::Ones(1), kb = Vec::Ones(1);
      for (int c = 0; c < copies; ++c) {
        ka = kron(ka, a);
        kb = kron(kb, b);
      }
      StateEnsemble ea, eb;
      ea.append(1.0, ka);
      eb.append(1.0, kb);
      residual = std::max(residual, 2.0 * trace_distance(ea, eb));
    }
  out.theta_residual = residual;
  return out;
}

}  // namespace qlab
