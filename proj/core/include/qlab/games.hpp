#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "qlab/constructions.hpp"
#include "qlab/typestates.hpp"

namespace qlab {

// ---------------------------------------------------------------------------
// Advantage estimates
// ---------------------------------------------------------------------------

struct AdvantageEstimate {
  double p_real = 0.0;
  double p_ideal = 0.0;
  long trials = 0;

  double advantage() const { return std::abs(p_real - p_ideal); }
  /// Binomial standard error of the advantage (both worlds combined).
  double stderr_value() const;
};

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};
WilsonInterval wilson_interval(double p_hat, long n, double z);

class BudgetExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Local quantum workspace
// ---------------------------------------------------------------------------

/// A growing joint pure state with register bookkeeping; the local quantum
/// memory of one party or one distinguisher run.
class Workspace {
public:
  std::size_t add_register(const Vec& state);

  const Vec& state() const { return state_; }
  RegisterLayout layout() const { return RegisterLayout(dims_); }
  std::size_t register_count() const { return dims_.size(); }

  void apply(std::size_t reg, const Mat& op);

  /// Projective measurement of a family lifted to the listed registers.
  /// Collapses the state; returns the outcome index.
  int measure(std::span<const Mat> projectors, std::span<const std::size_t> regs,
              RngStream& rng);

  /// Probability of each outcome without collapsing.
  std::vector<double> outcome_probabilities(std::span<const Mat> projectors,
                                            std::span<const std::size_t> regs) const;

  /// Swap test between two equal-dimension registers; 1 = accept. Collapses.
  int measure_swap_test(std::size_t reg_a, std::size_t reg_b, RngStream& rng);

  /// Count of non-flag registers (digit != 0) among `regs`. Collapses.
  int measure_counting(std::span<const std::size_t> regs, RngStream& rng);

  Mat reduced(std::span<const std::size_t> regs) const;

private:
  std::vector<Eigen::Index> dims_;
  Vec state_ = Vec::Ones(1);
};

// ---------------------------------------------------------------------------
// Oracle-pair worlds and distinguishers (standard indifferentiability)
// ---------------------------------------------------------------------------

/// The registers handed to a distinguisher in one trial, as one joint pure
/// state. Registers beyond the released ones (a simulator's unreleased
/// internals) may be present but are not listed as accessible.
struct TrialView {
  Vec joint;
  RegisterLayout layout = RegisterLayout({1});
  std::vector<std::size_t> primary_regs;
  std::vector<std::size_t> secondary_regs;
  std::vector<bool> secondary_failed;

  double swap_accept(std::size_t reg_a, std::size_t reg_b) const;
  double project_accept(std::size_t reg, const Vec& target) const;
  Mat reduced(std::span<const std::size_t> regs) const;
};

using WorldSampler = std::function<TrialView(int primary, int secondary, RngStream&)>;

struct Distinguisher {
  std::string name;
  int primary_queries = 0;
  int secondary_queries = 0;
  std::function<double(const TrialView&)> accept_probability;
};

struct WorldBudgets {
  int primary_max = 0;
  int secondary_max = 0;
};

/// Runs the distinguisher against both worlds `trials` times each and
/// reports the empirical probabilities. Throws BudgetExceeded when the
/// distinguisher declares more queries than the budgets allow.
AdvantageEstimate indiff_advantage(const WorldSampler& real_world,
                                   const WorldSampler& ideal_world,
                                   const Distinguisher& dist, const WorldBudgets& budgets,
                                   long trials, RngStream& rng);

/// Real world of the retry construction: primary = CHRS- copies, secondary =
/// construction outputs (|phi> or failure after `retry_budget` attempts).
WorldSampler chrsm_construction_world(const StateDistribution& dist, int retry_budget);

/// Ideal world: primary = released registers of a fresh Rep-state simulator
/// with budget `sim_budget`, secondary = CHRS copies.
WorldSampler chrs_simulator_world(const StateDistribution& dist, int sim_budget);

/// Failure probe, cross swap test, and counting probe.
std::vector<Distinguisher> standard_indiff_suite(int t1, int t2);

/// Projects the first primary output onto a known reference state; separates
/// the worlds for unbalanced (fixed) distributions.
Distinguisher reference_projection_distinguisher(Vec reference);

// ---------------------------------------------------------------------------
// Adversary composition
// ---------------------------------------------------------------------------

/// An oracle algorithm over an emit-style oracle; `emit` hands out one fresh
/// register per call. The run returns its acceptance probability.
struct EmitAlgorithm {
  std::string name;
  int emit_budget = 0;
  std::function<double(const std::function<Vec()>& emit, RngStream&)> run;
};

/// An oracle algorithm bound to a concrete oracle model.
struct ModelAlgorithm {
  std::string name;
  int oracle_budget = 0;
  std::function<double(OracleModel&, RngStream&)> run;
};

/// A stateless per-emit simulator: answers one emit query with
/// `queries_per_emit` queries to the underlying model.
struct EmitSimulator {
  std::string name;
  int queries_per_emit = 1;
  std::function<Vec(OracleModel&)> emit;
};

/// Routes the adversary's emit queries through the simulator; the composed
/// budget is the product. Emit calls beyond the adversary's declared budget
/// throw BudgetExceeded.
ModelAlgorithm compose_adversary(const EmitAlgorithm& adversary, const EmitSimulator& sim);

// ---------------------------------------------------------------------------
// LOCC protocol runner
// ---------------------------------------------------------------------------

class LoccViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct LoccMessage {
  int round = 0;
  int sender = 0;
  int receiver = -1;  // -1 = broadcast
  std::vector<std::int64_t> payload;
};

struct LoccTranscript {
  std::vector<LoccMessage> messages;
  std::vector<int> local_query_counts;
};

/// Classical channel between parties. There is deliberately no operation
/// that moves a quantum register; attempting one throws.
class LoccChannel {
public:
  void send(int sender, int receiver, std::vector<std::int64_t> payload);
  [[noreturn]] void send_quantum(int sender, int receiver);

  std::vector<LoccMessage> visible_to(int party) const;
  const std::vector<LoccMessage>& all() const { return messages_; }
  void begin_round(int round) { round_ = round; }

private:
  int round_ = 0;
  std::vector<LoccMessage> messages_;
};

struct LoccPartyContext {
  int party = 0;
  int round = 0;
  Workspace* workspace = nullptr;
  OracleModel* oracle = nullptr;  // local handle; may be null
  LoccChannel* channel = nullptr;
  RngStream* rng = nullptr;
  std::optional<std::int64_t> output;
};

using LoccParty = std::function<void(LoccPartyContext&)>;

struct LoccRunResult {
  std::int64_t output = 0;  // party 0's final output
  LoccTranscript transcript;
  std::vector<std::optional<std::int64_t>> party_outputs;
};

/// Round-robin execution of party programs over local workspaces and a
/// classical channel. Party 0's output is the protocol output.
LoccRunResult locc_run(const std::vector<LoccParty>& parties,
                       std::vector<Workspace>& local_memories,
                       std::vector<OracleModel*> local_oracles, int rounds, RngStream& rng);

// ---------------------------------------------------------------------------
// PPT bound and key-lemma states
// ---------------------------------------------------------------------------

/// (1/2) || rho^G - sigma^G ||_1 with the partial transpose over the listed
/// registers; an upper bound on any LOCC distinguishing advantage.
double ppt_bound(const DensityOperator& rho, const DensityOperator& sigma,
                 const RegisterLayout& layout, std::span<const std::size_t> second_party);

struct KeyLemmaParams {
  int a1 = 0, a2 = 0, b1 = 0, b2 = 0;
  int N = 0;

  int total() const { return a1 + a2 + b1 + b2; }
  bool precondition() const { return N >= (total() + 1) * (total() + 1); }
  double bound() const;  // e * total^5 / sqrt(N)
};

/// A pair of mixtures over registers (A1, B1, A2, B2), each of dimension
/// N+1, plus the bipartition cut for the partial transpose.
struct StatePair {
  StateEnsemble rho;    // jointly shared count
  StateEnsemble sigma;  // per-block independent counts
  RegisterLayout layout = RegisterLayout({1});
  std::vector<std::size_t> second_party;  // registers of (A2, B2)
  Eigen::Index first_dim = 1;             // dim of the (A1, B1) block
};

/// Zero-padded collision-free type mixtures (the combinatorial core).
StatePair key_lemma_states(const KeyLemmaParams& p);

/// Hidden-state mixtures in their exact type representation (collisions
/// included); equals the Haar-averaged copy structure.
StatePair mainthm_states(const KeyLemmaParams& p);

enum class PptMethod { Auto, Dense, Projected };

struct PptNormResult {
  double value = 0.0;
  double frobenius_gap = 0.0;  // |  ||.||_F^2 (full) - ||.||_F^2 (projected) |
  bool certified = true;       // projected route captured the full support
};

/// || (rho - sigma)^Gamma ||_1 for mixtures over a product split
/// [0, first_dim) x rest. The projected route works in the orthonormal
/// zero-padded type product basis and certifies itself by comparing
/// Frobenius mass; the dense route materializes the operator.
PptNormResult ppt_trace_norm_mixtures(const StatePair& pair, PptMethod method);

struct KeyLemmaVerification {
  double lhs = 0.0;
  double bound = 0.0;
  bool precondition_met = false;
  bool certified = true;
};

KeyLemmaVerification verify_key_lemma(const KeyLemmaParams& p,
                                      PptMethod method = PptMethod::Auto);

// ---------------------------------------------------------------------------
// Counting measurement and hybrids
// ---------------------------------------------------------------------------

struct CountingBranch {
  int count = 0;
  double probability = 0.0;
  StateEnsemble post;  // normalized mixture conditioned on the count
};

/// Measurement of the number of non-flag registers among `regs`.
std::vector<CountingBranch> counting_measurement(const StateEnsemble& rho,
                                                 const RegisterLayout& layout,
                                                 std::span<const std::size_t> regs);

/// Measure-and-forget: the dephased mixture over counts.
StateEnsemble counting_dephase(const StateEnsemble& rho, const RegisterLayout& layout,
                               std::span<const std::size_t> regs);

struct HybridBlock {
  int a = 0;
  int b = 0;
};

/// Hybrid state with the first `independent_blocks` blocks carrying their own
/// binomial counts and the remaining blocks sharing one. Register order is
/// block 0's a then b registers, block 1's, and so on.
/// independent_blocks = 0 reproduces the shared state, = #blocks the product.
StateEnsemble hybrid_state(int N, const std::vector<HybridBlock>& blocks,
                           int independent_blocks, bool collision_free_only);

struct HybridChainResult {
  std::vector<double> step_ppt;           // per-step PPT distance at its own cut
  std::vector<double> endpoint_residual;  // hybrid-chain endpoint identities
  std::vector<double> direct_ppt;         // per-cut rho-vs-sigma distance
  std::vector<double> step_sum_at_cut;    // per-cut sum of step distances
  std::vector<double> step_bound;         // key-lemma bound per step
};

HybridChainResult hybrid_chain_check(int N, const std::vector<HybridBlock>& blocks,
                                     PptMethod method = PptMethod::Auto);

// ---------------------------------------------------------------------------
// State-distinguishing experiments (one copy of rho or sigma)
// ---------------------------------------------------------------------------

struct StateDistinguisher {
  std::string name;
  bool locc = true;
  std::function<double(const Vec& sample)> accept_probability;
};

AdvantageEstimate state_advantage(const StateEnsemble& rho, const StateEnsemble& sigma,
                                  const StateDistinguisher& d, long trials, RngStream& rng);

/// Exact advantage: the acceptance functional is linear in the density.
double exact_state_advantage(const StateEnsemble& rho, const StateEnsemble& sigma,
                             const StateDistinguisher& d);

/// Fixed LOCC suite on a two-register pair (B1 | B2): local counting compare
/// and seeded random local measurements with classical compare.
std::vector<StateDistinguisher> locc_state_suite(Eigen::Index reg_dim, std::uint64_t seed);

/// Seeded one-way LOCC strategies: party 2 measures a random binary POVM and
/// announces; party 1 measures a random announced-outcome-dependent POVM.
StateDistinguisher random_one_way_locc(Eigen::Index dim1, Eigen::Index dim2,
                                       std::uint64_t seed);

/// Joint swap test across the cut; not implementable by LOCC parties.
StateDistinguisher fused_swap_distinguisher(Eigen::Index reg_dim);

/// Optimal joint (Helstrom) distinguisher for rho vs sigma.
StateDistinguisher helstrom_distinguisher(const StateEnsemble& rho,
                                          const StateEnsemble& sigma);

// ---------------------------------------------------------------------------
// LOCC indifferentiability experiment
// ---------------------------------------------------------------------------

/// One trial of the multi-party oracle worlds. Party-local states are kept
/// separate (they are products across parties given the hidden draws).
struct LoccWorldTrial {
  std::vector<Vec> party_state;
  std::vector<RegisterLayout> party_layout;
  std::vector<std::vector<std::size_t>> primary_regs;
  std::vector<std::vector<std::size_t>> secondary_regs;
  std::vector<std::vector<bool>> primary_failed;
};

using LoccWorldSampler = std::function<LoccWorldTrial(
    const std::vector<int>& primary_per_party, const std::vector<int>& secondary_per_party,
    RngStream&)>;

struct LoccDistinguisher {
  std::string name;
  bool locc = true;
  std::vector<int> primary_queries;    // per party
  std::vector<int> secondary_queries;  // per party
  std::function<double(const LoccWorldTrial&)> accept_probability;
};

/// Real world: every party gets (CHRS, fresh Rep-state simulator instance).
LoccWorldSampler locc_real_world(int n_qubits, int parties);

/// Ideal world: every party gets (fresh retry extractor, CHRS-); the
/// extractor runs with the given retry budget.
LoccWorldSampler locc_ideal_world(int n_qubits, int parties, int retry_budget);

AdvantageEstimate locc_indiff_advantage(const LoccWorldSampler& real_world,
                                        const LoccWorldSampler& ideal_world,
                                        const LoccDistinguisher& d, long trials,
                                        RngStream& rng);

/// Per-budget advantage envelope: the exact PPT distance across the party
/// cut of the corresponding view-state pair plus the extractor failure mass
/// parties * t1 * 2^(-retry).
double locc_indiff_envelope(int n_qubits, int parties, int t1_per_party, int t2_per_party,
                            int retry_budget);

/// Fixed LOCC suite over the two-party worlds: local counting of a
/// construction output with classical compare, and a local swap test of the
/// extracted copy against a construction output with classical compare.
std::vector<LoccDistinguisher> locc_world_suite(int t2_per_party);

/// Non-LOCC witnesses holding both parties' registers: the cross-party swap
/// test, and the optimal joint measurement on the exact view densities.
LoccDistinguisher locc_fused_swap(Eigen::Index reg_dim);
LoccDistinguisher locc_fused_helstrom(int n_qubits);

struct LoccIndiffRow {
  std::string distinguisher;
  bool locc = true;
  AdvantageEstimate estimate;
  double envelope = 0.0;
  bool within = false;  // LOCC rows: advantage under envelope + 4 sigma;
                        // fused rows: advantage strictly above the envelope
};

/// The end-to-end experiment: every suite member against its own-budget
/// envelope, then the fused witnesses against the t1 = 0 envelope.
std::vector<LoccIndiffRow> locc_indiff_experiment(int n_qubits, int parties,
                                                  int t2_per_party, int retry_budget,
                                                  long trials, RngStream& rng);

// ---------------------------------------------------------------------------
// Key-exchange games
// ---------------------------------------------------------------------------

enum class KeGame { Correctness, Security };

struct KeProtocol {
  std::string name;
  int rounds = 1;
  int oracle_queries_per_party = 0;
  /// Fresh stateful party programs per run; index 0 = Alice, 1 = Bob.
  std::function<LoccParty()> alice;
  std::function<LoccParty()> bob;
};

struct KeAdversary {
  std::string name;
  std::function<std::int64_t(const LoccTranscript&, RngStream&)> guess;
};

struct KeGameResult {
  double win_rate = 0.0;  // empirical game-output-1 rate
  long trials = 0;
  double guess_offset = 0.0;  // c of the (t, eps; c) parameterization
};

/// Correctness: output 1 iff the parties' keys disagree. Security: output 1
/// iff the adversary's guess matches Alice's key (c = 1/2).
KeGameResult ke_game_run(const KeProtocol& protocol, KeGame game,
                         const StateDistribution& dist, const KeAdversary* adversary,
                         long trials, RngStream& rng);

}  // namespace qlab
