#pragma once

#include <optional>
#include <string>

#include "qlab/hilbert.hpp"

namespace qlab {

// ---------------------------------------------------------------------------
// Hidden-state distributions
// ---------------------------------------------------------------------------

enum class DistributionKind { Haar, DiscretePhase, Fixed };

/// Distribution over pure states of dimension N = 2^n, together with exact
/// moment access. DiscretePhase(x, M) samples e^{2 pi i j / M} |x> for
/// uniform j; Fixed is a point mass.
class StateDistribution {
public:
  static StateDistribution haar(int n_qubits);
  static StateDistribution discrete_phase(int n_qubits, int levels, int base_symbol);
  static StateDistribution fixed(int n_qubits, Vec state);
  static StateDistribution fixed_basis(int n_qubits, int base_symbol);

  DistributionKind kind() const { return kind_; }
  int qubits() const { return n_; }
  Eigen::Index dim() const { return Eigen::Index(1) << n_; }  // N
  int phase_levels() const { return levels_; }
  int base_symbol() const { return base_symbol_; }

  /// One sample, as an unembedded vector of dimension N.
  Vec sample(RngStream& rng) const;

  /// Finite support with weights (DiscretePhase and Fixed only).
  bool has_finite_support() const { return kind_ != DistributionKind::Haar; }
  StateEnsemble support() const;

  /// E[ phi^(x) k  (phi^(x) k)^dagger ] over (C^N)^(x) k, exact.
  /// Haar: symmetric projector / C(N+k-1, k). Finite support: direct average.
  Mat equal_count_moment(int k) const;

  /// |E[e^{i delta theta}]| under the distribution's phase twirl. Haar carries
  /// a full phase twirl; DiscretePhase averages over the M-th roots of unity;
  /// Fixed has no twirl (returns 1 for delta != 0).
  double phase_average_magnitude(int delta) const;

  /// Compact text record: "kind=haar n=2", "kind=phase n=2 m=6 x=1",
  /// "kind=fixed n=1 x=1".
  std::string serialize() const;
  static StateDistribution parse(const std::string& record);

private:
  StateDistribution() = default;
  DistributionKind kind_ = DistributionKind::Haar;
  int n_ = 1;
  int levels_ = 0;       // DiscretePhase
  int base_symbol_ = 0;  // DiscretePhase / basis-state Fixed, in [1, N]
  Vec fixed_state_;      // Fixed
};

/// True iff every moment with unequal ket/bra phi counts up to t vanishes
/// (within tol) under the distribution's phase average.
bool is_balanced(const StateDistribution& dist, int max_moment, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Embedding into dimension N+1
// ---------------------------------------------------------------------------

/// Index 0 of an embedded register is the distinguished flag vector,
/// orthogonal to every embedded state; indices 1..N carry C^N.
Vec embed(const Vec& phi);
Vec flag_vector(Eigen::Index embedded_dim);

/// (flag - phi) / sqrt(2) for an embedded phi.
Vec minus_state(const Vec& phi_embedded);

// ---------------------------------------------------------------------------
// Oracle models
// ---------------------------------------------------------------------------

enum class OracleKind { Chrs, ChrsMinus, Swap };

/// A stateful query interface hiding one embedded state sampled at
/// construction. Copies handed out by queries are fresh tensor factors; the
/// query counter increments monotonically.
class OracleModel {
public:
  OracleModel(OracleKind kind, const StateDistribution& dist, RngStream& rng);

  /// Fixed hidden state; used by exact sweeps and tests.
  static OracleModel with_hidden(OracleKind kind, Vec phi_embedded);

  OracleKind kind() const { return kind_; }
  Eigen::Index register_dim() const { return hidden_.size(); }  // N+1
  int query_count() const { return queries_; }

  /// The sampled |phi> (embedded). Exposed for exact verification; honest
  /// adversary code must not read it.
  const Vec& hidden_embedded() const { return hidden_; }

  /// CHRS query: a fresh register holding |phi>.
  Vec query_chrs();

  /// CHRS- query: a fresh register holding (flag - phi)/sqrt(2).
  Vec query_chrsm();

  /// The swap unitary I - |0><0| - |phi><phi| + |0><phi| + |phi><0|.
  Mat swap_unitary() const;

  /// Apply the swap unitary to one register of a joint pure state.
  Vec apply_swap(const Vec& joint, const RegisterLayout& layout, std::size_t reg);

  /// Apply the swap controlled on a dimension-2 register. One oracle query.
  Vec apply_controlled_swap(const Vec& joint, const RegisterLayout& layout,
                            std::size_t control_reg, std::size_t target_reg);

private:
  OracleModel() = default;
  void require_kind(OracleKind k, const char* who) const;

  OracleKind kind_ = OracleKind::Chrs;
  Vec hidden_;  // embedded, dim N+1
  int queries_ = 0;
};

}  // namespace qlab
