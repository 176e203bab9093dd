#pragma once

#include "qlab/games.hpp"

namespace qlab {

// ---------------------------------------------------------------------------
// Toy one-way state generator
// ---------------------------------------------------------------------------

/// Keyed generator over the CHRS model: StateGen(k) outputs one oracle copy
/// of |phi> tagged with a key-dependent ancilla rotation; Ver(k', .) checks
/// the copy against fresh oracle copies with a symmetric-subspace test and
/// projects the ancilla onto |a_k'>. The verification operator is
/// U_k^dag (|1><1| (x) I) U_k for the measurement unitary U_k.
struct ToyOwsg {
  std::string name;
  int key_bits = 4;
  int n = 4;              // oracle qubit count
  int verify_copies = 1;  // fresh oracle copies consumed per Ver call
  bool colliding_keys = false;

  int key_count() const { return 1 << key_bits; }

  /// Ancilla qubit |a_k>; colliding variant reuses angles pairwise.
  Vec ancilla(int key) const;

  /// Acceptance probability of Ver(candidate, .) on one honest output of
  /// `key` (the symmetric test passes identically; the ancilla overlap
  /// carries the key dependence).
  double per_copy_accept(int candidate, int key) const;
};

ToyOwsg make_copies_owsg(int key_bits, int n, int verify_copies, bool colliding_keys);

/// Empirical rate of Ver(k, .) rejecting honest outputs.
double owsg_correctness_failure(const ToyOwsg& owsg, long trials, RngStream& rng);

// ---------------------------------------------------------------------------
// Threshold search
// ---------------------------------------------------------------------------

/// Candidates with their exact acceptance probabilities Tr(Pi_i rho); the
/// promise is that some candidate meets promise_threshold.
struct ThresholdSearchInstance {
  std::vector<double> acceptance;
  double promise_threshold = 0.75;
  double target_threshold = 1.0 / 3.0;
  int block_budget = 0;  // measured mode: fresh amplified blocks available
};

enum class ThresholdMode { Measured, ExactOracle };

struct ThresholdResult {
  bool found = false;
  int index = -1;
  int blocks_used = 0;
};

/// Exact-oracle mode scans candidates deterministically and returns the
/// first with acceptance >= target. Measured mode visits candidates in
/// random order, spending one fresh amplified block per visit, and returns
/// the first accepting one; exhausting the budget yields not-found.
ThresholdResult threshold_search(const ThresholdSearchInstance& instance, ThresholdMode mode,
                                 RngStream& rng);

// ---------------------------------------------------------------------------
// OWSG key-recovery attack
// ---------------------------------------------------------------------------

struct OwsgAttackResult {
  bool found = false;
  int recovered_key = -1;
  double amplified_acceptance = 0.0;  // acceptance of Pi^(x)R for the recovered key
  double per_copy_acceptance = 0.0;   // single-copy Ver acceptance
  int copies_used = 0;                // oracle-output copies consumed (measured mode)
  bool game_win = false;              // final Ver(k', rho_k) measurement outcome
};

/// Runs threshold search over all keys on blocks of R = 10 * n_param
/// amplified verifications. In exact-oracle mode the returned key always
/// satisfies the target threshold, hence per-copy acceptance
/// >= 3^(-1/R) >= 1 - ln(3)/R.
OwsgAttackResult owsg_attack(const ToyOwsg& owsg, int n_param, ThresholdMode mode,
                             RngStream& rng);

/// 3^(-1/(10n)) >= 1 - ln(3)/(10n) >= 1 - 1/n over the given range.
bool threshold_chain_holds(int n_min, int n_max);

// ---------------------------------------------------------------------------
// Barrier experiments
// ---------------------------------------------------------------------------

/// A cloner receives the trial's hidden |phi> (embedded) plus its copy
/// budget and produces a candidate register state. The honest ones only look
/// at measurement outcomes of the copies; the cheat one reads phi directly.
using Cloner = std::function<Vec(const Vec& phi_embedded, int copies, RngStream&)>;

Cloner trivial_cloner();             // outputs the flag vector
Cloner cheat_cloner();               // outputs the true |phi->
Cloner measure_and_prepare_cloner();  // basis-measures a copy, prepares its minus state

/// Swap-test distinguisher between the shared-count world and the product
/// world, fed with the cloner's candidate: accept = swap test between the
/// candidate and the last register.
AdvantageEstimate barrier_cloning_experiment(const Cloner& cloner, int t1, int t2, int n,
                                             long trials, RngStream& rng);

struct PhaseAgreementResult {
  double agreement_rate = 0.0;        // two parties on |phi-> copies
  double agreement_rate_plain = 0.0;  // same estimator on |phi> copies
  double theta_residual = 0.0;        // max || rho_theta - rho_theta' ||_1, |phi> copies
  long trials = 0;
};

/// Two no-communication parties estimate a hidden phase theta from local
/// copies by swap tests against a grid of candidate states and output a
/// rounded bit. With |phi-> copies the phase is physical; with plain |phi>
/// copies it is global and invisible.
PhaseAgreementResult barrier_phase_agreement(int swap_tests_per_party, int grid,
                                             long trials, RngStream& rng);

}  // namespace qlab
