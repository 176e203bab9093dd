#pragma once

#include <span>
#include <vector>

#include "qlab/linalg.hpp"
#include "qlab/rng.hpp"

namespace qlab {

/// Ordered register dimensions (d_1, ..., d_r). Register 0 is the most
/// significant in the flat index: flat = sum_r idx_r * stride_r with
/// stride_r = prod_{s>r} d_s, matching kron(a, b).
class RegisterLayout {
public:
  explicit RegisterLayout(std::vector<Eigen::Index> dims);

  std::size_t size() const { return dims_.size(); }
  Eigen::Index dim(std::size_t r) const { return dims_.at(r); }
  Eigen::Index stride(std::size_t r) const { return strides_.at(r); }
  Eigen::Index total_dim() const { return total_; }
  const std::vector<Eigen::Index>& dims() const { return dims_; }

  Eigen::Index flat(std::span<const Eigen::Index> digits) const;
  void unflat(Eigen::Index flat_index, std::span<Eigen::Index> digits_out) const;

  /// Layout of the listed registers, in the listed order.
  RegisterLayout sublayout(std::span<const std::size_t> registers) const;

  bool operator==(const RegisterLayout& other) const { return dims_ == other.dims_; }

private:
  std::vector<Eigen::Index> dims_;
  std::vector<Eigen::Index> strides_;
  Eigen::Index total_ = 1;
};

/// Normalized complex amplitude vector.
class PureState {
public:
  explicit PureState(Vec amplitudes);
  static PureState basis(Eigen::Index dim, Eigen::Index index);

  Eigen::Index dim() const { return amps_.size(); }
  const Vec& amplitudes() const { return amps_; }

private:
  Vec amps_;
};

/// Hermitian, PSD, unit-trace operator. The constructor checks Hermiticity
/// and trace; validate_full() additionally checks the spectrum (it costs an
/// eigensolve, so it is reserved for tests and small operators).
class DensityOperator {
public:
  explicit DensityOperator(Mat matrix);
  static DensityOperator from_pure(const Vec& state);

  Eigen::Index dim() const { return m_.rows(); }
  const Mat& matrix() const { return m_; }

  void validate_full(double eig_tol = 1e-10) const;

private:
  Mat m_;
};

struct BinomialSample {
  int trials = 0;
  int count = 0;  // in [0, trials]
};

// ---------------------------------------------------------------------------
// Tensor algebra
// ---------------------------------------------------------------------------

PureState tensor(const PureState& a, const PureState& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

/// Trace out all registers not listed in `keep`; the result is laid out in
/// the order given by `keep`. Throws if the layout does not match rho.
DensityOperator partial_trace(const DensityOperator& rho, const RegisterLayout& layout,
                              std::span<const std::size_t> keep);

/// Reduced density operator Tr_rest |v><v| of a pure joint state.
Mat reduced_density(const Vec& state, const RegisterLayout& layout,
                    std::span<const std::size_t> keep);

/// Transpose the listed registers in place of the identity on the rest.
/// Involution: applying it twice returns the input exactly.
Mat partial_transpose(const Mat& m, const RegisterLayout& layout,
                      std::span<const std::size_t> registers);

/// Apply a single-register operator to register r of a joint pure state.
Vec apply_to_register(const Vec& state, const RegisterLayout& layout, std::size_t r,
                      const Mat& op);

/// Reorder registers: position k of the result holds old register
/// new_order[k]. new_order must list every register exactly once.
Vec permute_registers(const Vec& state, const RegisterLayout& layout,
                      std::span<const std::size_t> new_order);

/// Apply an operator defined over the sublayout of `regs` (in listed order)
/// to those registers of the joint state.
Vec apply_subset_op(const Vec& state, const RegisterLayout& layout,
                    std::span<const std::size_t> regs, const Mat& op);

// ---------------------------------------------------------------------------
// Norms, distances, projectors
// ---------------------------------------------------------------------------

double trace_distance(const DensityOperator& a, const DensityOperator& b);

/// Projector onto the permutation-symmetric subspace of k registers of
/// dimension d.
Mat sym_projector(Eigen::Index d, int k);

/// SWAP operator on two registers of dimension d.
Mat swap_operator(Eigen::Index d);

/// Acceptance probability (1 + Tr[SWAP rho]) / 2 of the two-register swap
/// test. Throws if the joint state is not over two equal registers.
double swap_test(const DensityOperator& joint, const RegisterLayout& layout);

/// Swap-test acceptance for a product of two pure states: (1+|<a|b>|^2)/2.
double swap_test(const Vec& a, const Vec& b);

double fidelity(const Vec& a, const Vec& b);  // |<a|b>|^2

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Haar-random pure state on n qubits (dimension 2^n).
PureState sample_haar(int n_qubits, RngStream& rng);

/// One draw of Binomial(t, 1/2).
BinomialSample sample_binomial(int trials, RngStream& rng);

/// Pr[Binomial(t, 1/2) = c] = C(t, c) / 2^t.
double binomial_pmf(int trials, int count);

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

struct MeasurementOutcome {
  int index = 0;
  double probability = 0.0;
  DensityOperator post_state;
};

struct PureBranch {
  double probability = 0.0;
  Vec post_state;  // normalized; zero vector when probability is 0
};

/// Born-rule measurement of a projector family {P_i}. Throws if the family
/// does not sum to the identity within 1e-8.
MeasurementOutcome apply_measurement(const DensityOperator& rho,
                                     std::span<const Mat> projectors, RngStream& rng);

/// All branches of a projective measurement on a pure state.
std::vector<PureBranch> measure_branches(const Vec& state, std::span<const Mat> projectors);

// ---------------------------------------------------------------------------
// Weighted pure-state mixtures
// ---------------------------------------------------------------------------

/// Finite mixture of pure states. Mixtures arising here have few components
/// in a large space, so trace distances between them are computed exactly
/// from the Gram structure instead of through a dense eigensolve.
struct StateEnsemble {
  struct Component {
    double weight;
    Vec state;
  };
  std::vector<Component> components;

  Eigen::Index dim() const { return components.empty() ? 0 : components.front().state.size(); }
  double total_weight() const;
  void append(double weight, Vec state);
  Mat to_density() const;

  /// Draw a component index according to the weights (weights must sum to 1).
  const Vec& sample(RngStream& rng) const;
};

/// Exact trace distance between two mixtures, via a thin QR factorization of
/// the joint component span. Cost is O(dim * r^2) for r total components.
double trace_distance(const StateEnsemble& a, const StateEnsemble& b);

}  // namespace qlab
