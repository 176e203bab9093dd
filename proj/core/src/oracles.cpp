#include "qlab/oracles.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qlab/combinatorics.hpp"

namespace qlab {

// ---------------------------------------------------------------------------
// StateDistribution
// ---------------------------------------------------------------------------

StateDistribution StateDistribution::haar(int n_qubits) {
  if (n_qubits < 0) throw std::invalid_argument("haar: negative qubit count");
  StateDistribution d;
  d.kind_ = DistributionKind::Haar;
  d.n_ = n_qubits;
  return d;
}

StateDistribution StateDistribution::discrete_phase(int n_qubits, int levels, int base_symbol) {
  StateDistribution d;
  d.kind_ = DistributionKind::DiscretePhase;
  d.n_ = n_qubits;
  d.levels_ = levels;
  d.base_symbol_ = base_symbol;
  if (levels < 1) throw std::invalid_argument("discrete_phase: levels must be >= 1");
  if (base_symbol < 1 || base_symbol > d.dim())
    throw std::invalid_argument("discrete_phase: base symbol out of [1, N]");
  return d;
}

StateDistribution StateDistribution::fixed(int n_qubits, Vec state) {
  StateDistribution d;
  d.kind_ = DistributionKind::Fixed;
  d.n_ = n_qubits;
  if (state.size() != d.dim()) throw std::invalid_argument("fixed: state dimension != 2^n");
  if (std::abs(state.squaredNorm() - 1.0) > 1e-12)
    throw std::invalid_argument("fixed: state not normalized");
  d.fixed_state_ = std::move(state);
  return d;
}

StateDistribution StateDistribution::fixed_basis(int n_qubits, int base_symbol) {
  StateDistribution probe = haar(n_qubits);
  Vec v = Vec::Zero(probe.dim());
  if (base_symbol < 1 || base_symbol > probe.dim())
    throw std::invalid_argument("fixed_basis: base symbol out of [1, N]");
  v(base_symbol - 1) = 1.0;
  StateDistribution d = fixed(n_qubits, std::move(v));
  d.base_symbol_ = base_symbol;
  return d;
}

Vec StateDistribution::sample(RngStream& rng) const {
  switch (kind_) {
    case DistributionKind::Haar:
      return sample_haar(n_, rng).amplitudes();
    case DistributionKind::DiscretePhase: {
      const int j = static_cast<int>(rng.uniform_below(levels_));
      Vec v = Vec::Zero(dim());
      const double theta = 2.0 * std::numbers::pi * j / levels_;
      v(base_symbol_ - 1) = Cx(std::cos(theta), std::sin(theta));
      return v;
    }
    case DistributionKind::Fixed:
      return fixed_state_;
  }
  throw std::logic_error("unreachable");
}

StateEnsemble StateDistribution::support() const {
  StateEnsemble e;
  switch (kind_) {
    case DistributionKind::Haar:
      throw std::invalid_argument("support: Haar has no finite support");
    case DistributionKind::DiscretePhase: {
      for (int j = 0; j < levels_; ++j) {
        Vec v = Vec::Zero(dim());
        const double theta = 2.0 * std::numbers::pi * j / levels_;
        v(base_symbol_ - 1) = Cx(std::cos(theta), std::sin(theta));
        e.append(1.0 / levels_, std::move(v));
      }
      return e;
    }
    case DistributionKind::Fixed:
      e.append(1.0, fixed_state_);
      return e;
  }
  throw std::logic_error("unreachable");
}

Mat StateDistribution::equal_count_moment(int k) const {
  if (k < 0) throw std::invalid_argument("equal_count_moment: negative order");
  const Eigen::Index n = dim();
  if (k == 0) return Mat::Identity(1, 1);
  if (kind_ == DistributionKind::Haar) {
    const double d = binom(static_cast<int>(n) + k - 1, k);
    return sym_projector(n, k) / d;
  }
  StateEnsemble sup = support();
  Eigen::Index total = 1;
  for (int i = 0; i < k; ++i) total *= n;
  Mat out = Mat::Zero(total, total);
  for (const auto& c : sup.components) {
    Vec power = c.state;
    for (int i = 1; i < k; ++i) power = kron(power, c.state);
    out.noalias() += c.weight * (power * power.adjoint());
  }
  return out;
}

double StateDistribution::phase_average_magnitude(int delta) const {
  switch (kind_) {
    case DistributionKind::Haar:
      // Continuous twirl: the average of e^{i delta theta} over [0, 2pi).
      return delta == 0 ? 1.0 : 0.0;
    case DistributionKind::DiscretePhase: {
      Cx acc = 0.0;
      for (int j = 0; j < levels_; ++j) {
        const double theta = 2.0 * std::numbers::pi * j * delta / levels_;
        acc += Cx(std::cos(theta), std::sin(theta));
      }
      return std::abs(acc) / levels_;
    }
    case DistributionKind::Fixed:
      return 1.0;
  }
  throw std::logic_error("unreachable");
}

std::string StateDistribution::serialize() const {
  std::ostringstream os;
  switch (kind_) {
    case DistributionKind::Haar:
      os << "kind=haar n=" << n_;
      break;
    case DistributionKind::DiscretePhase:
      os << "kind=phase n=" << n_ << " m=" << levels_ << " x=" << base_symbol_;
      break;
    case DistributionKind::Fixed:
      if (base_symbol_ < 1)
        throw std::invalid_argument("serialize: only basis-state Fixed distributions serialize");
      os << "kind=fixed n=" << n_ << " x=" << base_symbol_;
      break;
  }
  return os.str();
}

StateDistribution StateDistribution::parse(const std::string& record) {
  std::istringstream is(record);
  std::string token, kind;
  int n = -1, m = 0, x = 0;
  while (is >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("parse: bad token " + token);
    const std::string key = token.substr(0, eq);
    const std::string val = token.substr(eq + 1);
    if (key == "kind") kind = val;
    else if (key == "n") n = std::stoi(val);
    else if (key == "m") m = std::stoi(val);
    else if (key == "x") x = std::stoi(val);
    else throw std::invalid_argument("parse: unknown key " + key);
  }
  if (n < 0) throw std::invalid_argument("parse: missing n");
  if (kind == "haar") return haar(n);
  if (kind == "phase") return discrete_phase(n, m, x);
  if (kind == "fixed") return fixed_basis(n, x);
  throw std::invalid_argument("parse: unknown kind " + kind);
}

bool is_balanced(const StateDistribution& dist, int max_moment, double tol) {
  if (max_moment < 1) throw std::invalid_argument("is_balanced: max_moment must be >= 1");
  // A moment with j phi-kets and k phi-bras carries the phase e^{i(j-k)theta}
  // under the twirl, so it survives only when the phase average at delta=j-k
  // is nonzero. Fixed distributions expose the moment tensor directly (norm 1).
  for (int delta = 1; delta <= max_moment; ++delta)
    if (dist.phase_average_magnitude(delta) > tol) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Embedding
// ---------------------------------------------------------------------------

Vec embed(const Vec& phi) {
  Vec out = Vec::Zero(phi.size() + 1);
  out.tail(phi.size()) = phi;
  return out;
}

Vec flag_vector(Eigen::Index embedded_dim) {
  Vec out = Vec::Zero(embedded_dim);
  out(0) = 1.0;
  return out;
}

Vec minus_state(const Vec& phi_embedded) {
  if (std::abs(phi_embedded(0)) > 1e-12)
    throw std::invalid_argument("minus_state: input has flag support");
  Vec out = -phi_embedded;
  out(0) += 1.0;
  return out / std::numbers::sqrt2;
}

// ---------------------------------------------------------------------------
// OracleModel
// ---------------------------------------------------------------------------

OracleModel::OracleModel(OracleKind kind, const StateDistribution& dist, RngStream& rng)
    : kind_(kind), hidden_(embed(dist.sample(rng))) {}

OracleModel OracleModel::with_hidden(OracleKind kind, Vec phi_embedded) {
  if (std::abs(phi_embedded(0)) > 1e-12)
    throw std::invalid_argument("with_hidden: hidden state must be orthogonal to the flag");
  if (std::abs(phi_embedded.squaredNorm() - 1.0) > 1e-12)
    throw std::invalid_argument("with_hidden: hidden state not normalized");
  OracleModel m;
  m.kind_ = kind;
  m.hidden_ = std::move(phi_embedded);
  return m;
}

void OracleModel::require_kind(OracleKind k, const char* who) const {
  if (kind_ != k) throw std::logic_error(std::string(who) + ": wrong oracle kind");
}

Vec OracleModel::query_chrs() {
  require_kind(OracleKind::Chrs, "query_chrs");
  ++queries_;
  return hidden_;
}

Vec OracleModel::query_chrsm() {
  require_kind(OracleKind::ChrsMinus, "query_chrsm");
  ++queries_;
  return minus_state(hidden_);
}

Mat OracleModel::swap_unitary() const {
  const Eigen::Index d = hidden_.size();
  Vec f = flag_vector(d);
  Mat u = Mat::Identity(d, d);
  u.noalias() -= f * f.adjoint();
  u.noalias() -= hidden_ * hidden_.adjoint();
  u.noalias() += f * hidden_.adjoint();
  u.noalias() += hidden_ * f.adjoint();
  return u;
}

Vec OracleModel::apply_swap(const Vec& joint, const RegisterLayout& layout, std::size_t reg) {
  require_kind(OracleKind::Swap, "apply_swap");
  if (layout.dim(reg) != register_dim())
    throw std::invalid_argument("apply_swap: register dimension mismatch");
  ++queries_;
  return apply_to_register(joint, layout, reg, swap_unitary());
}

Vec OracleModel::apply_controlled_swap(const Vec& joint, const RegisterLayout& layout,
                                       std::size_t control_reg, std::size_t target_reg) {
  require_kind(OracleKind::Swap, "apply_controlled_swap");
  if (layout.dim(control_reg) != 2)
    throw std::invalid_argument("apply_controlled_swap: control register must be a qubit");
  if (layout.dim(target_reg) != register_dim())
    throw std::invalid_argument("apply_controlled_swap: target register dimension mismatch");
  ++queries_;

  const Mat u = swap_unitary();
  const Eigen::Index d = register_dim();
  const Eigen::Index n = joint.size();
  Vec out = Vec::Zero(n);
  std::vector<Eigen::Index> digits(layout.size());
  for (Eigen::Index idx = 0; idx < n; ++idx) {
    layout.unflat(idx, digits);
    if (digits[control_reg] == 0) {
      out(idx) += joint(idx);
      continue;
    }
    const Eigen::Index t = digits[target_reg];
    const Eigen::Index base = idx - t * layout.stride(target_reg);
    for (Eigen::Index i = 0; i < d; ++i)
      out(base + i * layout.stride(target_reg)) += u(i, t) * joint(idx);
  }
  return out;
}

}  // namespace qlab
