#pragma once

#include "qlab/oracles.hpp"

namespace qlab {

// ---------------------------------------------------------------------------
// Set / Rep states
// ---------------------------------------------------------------------------

/// Product state over t embedded registers: flag on slots outside `filled`,
/// -phi on slots inside. Slots are 0-based.
Vec set_state(int t, const std::vector<int>& filled, const Vec& phi_embedded);

/// Uniform superposition of all C(t, c) set states with c filled slots.
Vec rep_state(int t, int c, const Vec& phi_embedded);

// ---------------------------------------------------------------------------
// Postselection construction: |phi> from CHRS-
// ---------------------------------------------------------------------------

struct ExtractionResult {
  bool success = false;
  Vec output;        // embedded |phi> up to phase, when success
  int attempts = 0;  // CHRS- queries consumed
};

/// Draw |phi->, measure {flag, rest}, keep the residual on a non-flag
/// outcome. Each attempt succeeds with probability exactly 1/2; after
/// `retry_budget` flag outcomes the result is a failure.
ExtractionResult chrs_from_chrsm(OracleModel& chrsm, int retry_budget, RngStream& rng);

// ---------------------------------------------------------------------------
// Rep-state simulator
// ---------------------------------------------------------------------------

/// Stateful simulator that serves up to `budget` registers whose joint state
/// is |Rep_{budget, c, phi}> for a binomially sampled c. Initialization runs
/// the four-step circuit: sample c, draw c oracle copies into a pool, prepare
/// the marker Rep pattern, then sweep a counter-indexed controlled swap that
/// moves each marker into the pool and each pooled copy into its slot.
class SimChrs {
public:
  SimChrs(int budget, OracleModel& chrs, RngStream& rng);

  int budget() const { return budget_; }
  int sampled_count() const { return count_; }
  int queries_served() const { return next_; }

  /// Release the next output register; returns its index in joint_layout().
  std::size_t query();

  const Vec& joint_state() const { return state_; }
  const RegisterLayout& joint_layout() const { return layout_; }

  /// Register indices within the joint layout.
  std::size_t output_register(int i) const;   // A_i, 0-based
  std::size_t pool_register(int j) const;     // consumed-copy slot j, 0-based
  std::size_t counter_register() const;

private:
  int budget_;
  int count_;
  int next_ = 0;
  RegisterLayout layout_;
  Vec state_;
};

// ---------------------------------------------------------------------------
// Binomial mixture identity
// ---------------------------------------------------------------------------

/// Exact trace distance between
///   E_phi[ |phi-><phi-|^(x)t1 (x) |phi><phi|^(x)t2 ]  and
///   E_{phi, c~B(t1,1/2)}[ |Rep_{t1,c,phi}><...| (x) |phi><phi|^(x)t2 ].
/// Finite-support distributions are averaged exactly over their support;
/// the Haar case goes through the symmetric-moment expansion.
double verify_binom_lemma(const StateDistribution& dist, int t1, int t2);

// ---------------------------------------------------------------------------
// Reflection about a state from copies
// ---------------------------------------------------------------------------

/// The channel Q obtained by reflecting rho (x) |psi>^(x)t about the
/// symmetric subspace and discarding the copies. Evaluated in closed form:
/// with s = 2/(t+1) and P = |psi><psi|,
///   Q(rho) = (1-s)^2 rho - s(1-s) t (rho P + P rho)
///            + s^2 t Tr[rho] P + s^2 t(t-1) Tr[rho P] P.
Mat reflect_about_state_sim(const Mat& rho, const Vec& psi, int copies);

/// R rho R for R = I - 2|psi><psi|.
Mat reflect_exact(const Mat& rho, const Vec& psi);

/// Q (x) I applied to one register of a joint density operator.
Mat reflect_on_register(const Mat& joint, const RegisterLayout& layout, std::size_t reg,
                        const Vec& psi, int copies);

// ---------------------------------------------------------------------------
// Approximate swap oracle from a CHRS- pool
// ---------------------------------------------------------------------------

/// Swap-oracle stand-in backed by a pool of |phi-> copies. Each application
/// burns a fresh slice of `copies_per_query` pool states through the
/// reflection channel (the exact swap equals reflection about |phi->);
/// exhausting the pool throws instead of silently reusing copies.
class ApproxSwapOracle {
public:
  ApproxSwapOracle(OracleModel& chrsm, int copies_per_query, int query_budget = 1);

  Mat apply(const Mat& joint, const RegisterLayout& layout, std::size_t reg);

  int copies_per_query() const { return per_query_; }
  int remaining_queries() const { return remaining_; }

private:
  Vec minus_;
  int per_query_;
  int remaining_;
};

ApproxSwapOracle swap_from_chrsm(OracleModel& chrsm, int copies_per_query,
                                 int query_budget = 1);

// ---------------------------------------------------------------------------
// Exact stateless CHRS- simulator from one Swap query
// ---------------------------------------------------------------------------

/// Produces |phi-> exactly with a single swap query: prepare |-> |flag>,
/// apply the controlled swap, flip the control conditioned on the register
/// still being the flag, and return the second register.
Vec chrsm_from_swap(OracleModel& swap_oracle);

}  // namespace qlab
