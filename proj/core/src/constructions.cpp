#include "qlab/constructions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qlab/combinatorics.hpp"

namespace qlab {

// ---------------------------------------------------------------------------
// Set / Rep states
// ---------------------------------------------------------------------------

Vec set_state(int t, const std::vector<int>& filled, const Vec& phi_embedded) {
  if (t < 0) throw std::invalid_argument("set_state: negative register count");
  std::vector<bool> in(t, false);
  for (int s : filled) {
    if (s < 0 || s >= t) throw std::invalid_argument("set_state: slot out of range");
    in[s] = true;
  }
  Vec out = Vec::Ones(1);  // t = 0: the empty tensor product
  const Vec flag = flag_vector(phi_embedded.size());
  const Vec neg = -phi_embedded;
  for (int i = 0; i < t; ++i) out = kron(out, in[i] ? neg : flag);
  return out;
}

Vec rep_state(int t, int c, const Vec& phi_embedded) {
  if (c < 0 || c > t) throw std::invalid_argument("rep_state: c outside [0, t]");
  Eigen::Index dim = 1;
  for (int i = 0; i < t; ++i) dim *= phi_embedded.size();
  Vec out = Vec::Zero(dim);
  const double w = 1.0 / std::sqrt(binom(t, c));
  for (const auto& subset : subsets_of_size(t, c)) out += w * set_state(t, subset, phi_embedded);
  return out;
}

// ---------------------------------------------------------------------------
// Postselection construction
// ---------------------------------------------------------------------------

ExtractionResult chrs_from_chrsm(OracleModel& chrsm, int retry_budget, RngStream& rng) {
  if (retry_budget < 0) throw std::invalid_argument("chrs_from_chrsm: negative retry budget");
  ExtractionResult r;
  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    Vec v = chrsm.query_chrsm();
    ++r.attempts;
    const double p_flag = std::norm(v(0));
    if (rng.bernoulli(p_flag)) continue;  // flag outcome, retry
    v(0) = 0.0;
    v.normalize();
    r.success = true;
    r.output = std::move(v);
    return r;
  }
  return r;
}

// ---------------------------------------------------------------------------
// SimChrs
// ---------------------------------------------------------------------------

namespace {

RegisterLayout sim_layout(int budget, int count, Eigen::Index reg_dim) {
  std::vector<Eigen::Index> dims(static_cast<std::size_t>(budget + count), reg_dim);
  dims.push_back(budget + 2);  // counter register, values 0..budget+1
  return RegisterLayout(std::move(dims));
}

}  // namespace

SimChrs::SimChrs(int budget, OracleModel& chrs, RngStream& rng)
    : budget_(budget),
      count_(sample_binomial(budget, rng).count),
      layout_(sim_layout(budget, count_, chrs.register_dim())) {
  if (budget < 1) throw std::invalid_argument("SimChrs: budget must be >= 1");
  const Eigen::Index d = chrs.register_dim();
  const Vec marker = Vec::Unit(d, 1);

  // Marker Rep pattern on the output slots, oracle copies in the pool,
  // counter at 1.
  Vec state = rep_state(budget_, count_, marker);
  for (int j = 0; j < count_; ++j) state = kron(state, chrs.query_chrs());
  Vec ctr = Vec::Zero(budget_ + 2);
  ctr(1) = 1.0;
  state = kron(state, ctr);

  // Sweep: for each output slot, controlled on it being a non-flag marker,
  // swap it with the pool slot the counter points to and advance the counter.
  // On the reachable states this is a permutation of basis vectors.
  const std::size_t nregs = layout_.size();
  std::vector<Eigen::Index> digits(nregs);
  for (int i = 0; i < budget_; ++i) {
    Vec next = Vec::Zero(state.size());
    for (Eigen::Index idx = 0; idx < state.size(); ++idx) {
      if (state(idx) == Cx(0.0, 0.0)) continue;
      layout_.unflat(idx, digits);
      if (digits[static_cast<std::size_t>(i)] == 0) {
        next(idx) += state(idx);
        continue;
      }
      const Eigen::Index dpos = digits[nregs - 1];
      if (dpos < 1 || dpos > count_)
        throw std::logic_error("SimChrs: counter points outside the pool");
      const std::size_t pool = static_cast<std::size_t>(budget_) + dpos - 1;
      std::swap(digits[static_cast<std::size_t>(i)], digits[pool]);
      digits[nregs - 1] = dpos + 1;
      next(layout_.flat(digits)) += state(idx);
    }
    state.swap(next);
  }
  if (std::abs(state.squaredNorm() - 1.0) > 1e-12)
    throw std::logic_error("SimChrs: sweep was not norm-preserving");
  state_ = std::move(state);
}

std::size_t SimChrs::query() {
  if (next_ >= budget_) throw std::out_of_range("SimChrs: query budget exhausted");
  return static_cast<std::size_t>(next_++);
}

std::size_t SimChrs::output_register(int i) const {
  if (i < 0 || i >= budget_) throw std::out_of_range("SimChrs: bad output register index");
  return static_cast<std::size_t>(i);
}

std::size_t SimChrs::pool_register(int j) const {
  if (j < 0 || j >= count_) throw std::out_of_range("SimChrs: bad pool register index");
  return static_cast<std::size_t>(budget_ + j);
}

std::size_t SimChrs::counter_register() const { return layout_.size() - 1; }

// ---------------------------------------------------------------------------
// verify_binom_lemma
// ---------------------------------------------------------------------------

namespace {

Vec tensor_power(const Vec& v, int k) {
  Vec out = Vec::Ones(1);
  for (int i = 0; i < k; ++i) out = kron(out, v);
  return out;
}

double verify_binom_finite(const StateDistribution& dist, int t1, int t2) {
  StateEnsemble lhs, rhs;
  for (const auto& comp : dist.support().components) {
    const Vec phi = embed(comp.state);
    const Vec tail = tensor_power(phi, t2);
    lhs.append(comp.weight, kron(tensor_power(minus_state(phi), t1), tail));
    for (int c = 0; c <= t1; ++c)
      rhs.append(comp.weight * binomial_pmf(t1, c), kron(rep_state(t1, c, phi), tail));
  }
  return trace_distance(lhs, rhs);
}

// Dense builder for the Haar route. Adds, for every ket slot set S and bra
// slot set S', the lifted equal-count moment with the given weight. Slots
// outside the set carry the flag index 0.
void add_lifted_moment(RMat& acc, const RegisterLayout& layout, std::vector<int> ket_slots,
                       std::vector<int> bra_slots, const Mat& moment, Eigen::Index n,
                       double weight) {
  const int k = static_cast<int>(ket_slots.size());
  Eigen::Index strings = 1;
  for (int i = 0; i < k; ++i) strings *= n;

  std::vector<Eigen::Index> row_digits(layout.size(), 0), col_digits(layout.size(), 0);
  for (Eigen::Index u = 0; u < strings; ++u) {
    Eigen::Index uu = u;
    std::fill(row_digits.begin(), row_digits.end(), 0);
    for (int i = k - 1; i >= 0; --i) {
      row_digits[static_cast<std::size_t>(ket_slots[i])] = uu % n + 1;
      uu /= n;
    }
    const Eigen::Index row = layout.flat(row_digits);
    for (Eigen::Index v = 0; v < strings; ++v) {
      Eigen::Index vv = v;
      std::fill(col_digits.begin(), col_digits.end(), 0);
      for (int i = k - 1; i >= 0; --i) {
        col_digits[static_cast<std::size_t>(bra_slots[i])] = vv % n + 1;
        vv /= n;
      }
      acc(row, layout.flat(col_digits)) += weight * moment(u, v).real();
    }
  }
}

double verify_binom_haar(const StateDistribution& dist, int t1, int t2) {
  const Eigen::Index n = dist.dim();
  const int regs = t1 + t2;
  RegisterLayout layout(std::vector<Eigen::Index>(static_cast<std::size_t>(regs), n + 1));

  std::vector<Mat> moments(static_cast<std::size_t>(t1 + t2 + 1));
  for (int k = 0; k <= t1 + t2; ++k) moments[static_cast<std::size_t>(k)] = dist.equal_count_moment(k);

  std::vector<int> tail_slots(static_cast<std::size_t>(t2));
  for (int i = 0; i < t2; ++i) tail_slots[static_cast<std::size_t>(i)] = t1 + i;

  auto slots_with_tail = [&](const std::vector<int>& s) {
    std::vector<int> out = s;
    out.insert(out.end(), tail_slots.begin(), tail_slots.end());
    return out;
  };

  const double scale = std::pow(0.5, t1);

  // Expansion of |phi-><phi-|^(x)t1 over pairs of filled-slot sets. A pair
  // with |S| != |S'| carries the phase e^{i(|S|-|S'|)theta}, which vanishes
  // under the twirl; surviving pairs reduce to equal-count moments.
  RMat lhs = RMat::Zero(layout.total_dim(), layout.total_dim());
  for (int s = 0; s <= t1; ++s) {
    for (int s2 = 0; s2 <= t1; ++s2) {
      if (s != s2) {
        if (dist.phase_average_magnitude(s - s2) > 1e-12)
          throw std::invalid_argument("verify_binom_lemma: distribution is not balanced");
        continue;
      }
      const double sign = ((s + s2) % 2 == 0) ? 1.0 : -1.0;
      const Mat& mom = moments[static_cast<std::size_t>(s + t2)];
      for (const auto& ket : subsets_of_size(t1, s))
        for (const auto& bra : subsets_of_size(t1, s2))
          add_lifted_moment(lhs, layout, slots_with_tail(ket), slots_with_tail(bra), mom, n,
                            sign * scale);
    }
  }

  // Rep-mixture side: for each count c the Rep state expands over equal-size
  // pairs with weight pmf(c)/C(t1, c); signs are (+) for equal sizes.
  RMat rhs = RMat::Zero(layout.total_dim(), layout.total_dim());
  for (int c = 0; c <= t1; ++c) {
    const double w = binomial_pmf(t1, c) / binom(t1, c);
    const Mat& mom = moments[static_cast<std::size_t>(c + t2)];
    for (const auto& ket : subsets_of_size(t1, c))
      for (const auto& bra : subsets_of_size(t1, c))
        add_lifted_moment(rhs, layout, slots_with_tail(ket), slots_with_tail(bra), mom, n, w);
  }

  lhs -= rhs;
  return 0.5 * eigvals_symmetric_inplace(lhs).cwiseAbs().sum();
}

}  // namespace

double verify_binom_lemma(const StateDistribution& dist, int t1, int t2) {
  if (t1 < 0 || t2 < 0) throw std::invalid_argument("verify_binom_lemma: negative copy count");
  if (t1 + t2 == 0) return 0.0;
  if (dist.has_finite_support()) return verify_binom_finite(dist, t1, t2);
  return verify_binom_haar(dist, t1, t2);
}

// ---------------------------------------------------------------------------
// Reflection channel
// ---------------------------------------------------------------------------

Mat reflect_about_state_sim(const Mat& rho, const Vec& psi, int copies) {
  if (copies < 1) throw std::invalid_argument("reflect_about_state_sim: copies must be >= 1");
  if (rho.rows() != psi.size() || rho.cols() != psi.size())
    throw std::invalid_argument("reflect_about_state_sim: dimension mismatch");
  const double t = copies;
  const double s = 2.0 / (t + 1.0);
  const Mat p = psi * psi.adjoint();
  Mat out = (1.0 - s) * (1.0 - s) * rho;
  out.noalias() -= (s * (1.0 - s) * t) * (rho * p + p * rho);
  out.noalias() += (s * s * t) * rho.trace() * p;
  out.noalias() += (s * s * t * (t - 1.0)) * (p * rho).trace() * p;
  return out;
}

Mat reflect_exact(const Mat& rho, const Vec& psi) {
  const Mat r = Mat::Identity(psi.size(), psi.size()) - 2.0 * (psi * psi.adjoint());
  return r * rho * r;
}

namespace {

Mat lift_register_op(const RegisterLayout& layout, std::size_t reg, const Mat& op) {
  Mat out = Mat::Identity(1, 1);
  for (std::size_t r = 0; r < layout.size(); ++r)
    out = kron(out, r == reg ? op : Mat(Mat::Identity(layout.dim(r), layout.dim(r))));
  return out;
}

// P placed at register `reg`, rest filled from a density on the remaining
// registers (in their original order).
Mat insert_register_op(const Mat& rest, const RegisterLayout& layout, std::size_t reg,
                       const Mat& op) {
  const Eigen::Index n = layout.total_dim();
  const Eigen::Index d = layout.dim(reg);
  const Eigen::Index stride = layout.stride(reg);
  Mat out = Mat::Zero(n, n);
  // Index of the rest-space: digits of all registers except `reg`.
  auto rest_index = [&](Eigen::Index full) {
    const Eigen::Index high = full / (stride * d);
    const Eigen::Index low = full % stride;
    return high * stride + low;
  };
  for (Eigen::Index row = 0; row < n; ++row) {
    const Eigen::Index ri = (row / stride) % d;
    for (Eigen::Index col = 0; col < n; ++col) {
      const Eigen::Index ci = (col / stride) % d;
      out(row, col) = op(ri, ci) * rest(rest_index(row), rest_index(col));
    }
  }
  return out;
}

}  // namespace

Mat reflect_on_register(const Mat& joint, const RegisterLayout& layout, std::size_t reg,
                        const Vec& psi, int copies) {
  if (layout.total_dim() != joint.rows() || joint.rows() != joint.cols())
    throw std::invalid_argument("reflect_on_register: layout mismatch");
  if (layout.dim(reg) != psi.size())
    throw std::invalid_argument("reflect_on_register: register dim != psi dim");
  const double t = copies;
  const double s = 2.0 / (t + 1.0);
  const Mat p = psi * psi.adjoint();
  const Mat p_hat = lift_register_op(layout, reg, p);

  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < layout.size(); ++r)
    if (r != reg) keep.push_back(r);

  DensityOperator rho(joint);
  Mat rest = keep.empty() ? Mat::Identity(1, 1) * joint.trace()
                          : partial_trace(rho, layout, keep).matrix();
  // Tr_reg[(P x I) joint]: same reduction applied after projecting.
  Mat projected = p_hat * joint;
  Mat rest_proj = Mat::Zero(rest.rows(), rest.cols());
  {
    const Eigen::Index d = layout.dim(reg);
    const Eigen::Index stride = layout.stride(reg);
    auto rest_index = [&](Eigen::Index full) {
      const Eigen::Index high = full / (stride * d);
      const Eigen::Index low = full % stride;
      return high * stride + low;
    };
    for (Eigen::Index row = 0; row < joint.rows(); ++row)
      for (Eigen::Index col = 0; col < joint.cols(); ++col)
        if ((row / stride) % d == (col / stride) % d)
          rest_proj(rest_index(row), rest_index(col)) += projected(row, col);
  }

  Mat out = (1.0 - s) * (1.0 - s) * joint;
  out.noalias() -= (s * (1.0 - s) * t) * (joint * p_hat + p_hat * joint);
  out += (s * s * t) * insert_register_op(rest, layout, reg, p);
  out += (s * s * t * (t - 1.0)) * insert_register_op(rest_proj, layout, reg, p);
  return out;
}

// ---------------------------------------------------------------------------
// ApproxSwapOracle
// ---------------------------------------------------------------------------

ApproxSwapOracle::ApproxSwapOracle(OracleModel& chrsm, int copies_per_query, int query_budget)
    : per_query_(copies_per_query), remaining_(query_budget) {
  if (copies_per_query < 1)
    throw std::invalid_argument("ApproxSwapOracle: copies_per_query must be >= 1");
  if (query_budget < 1) throw std::invalid_argument("ApproxSwapOracle: query_budget must be >= 1");
  for (int i = 0; i < copies_per_query * query_budget; ++i) minus_ = chrsm.query_chrsm();
}

Mat ApproxSwapOracle::apply(const Mat& joint, const RegisterLayout& layout, std::size_t reg) {
  if (remaining_ <= 0) throw std::runtime_error("ApproxSwapOracle: pool exhausted");
  --remaining_;
  return reflect_on_register(joint, layout, reg, minus_, per_query_);
}

ApproxSwapOracle swap_from_chrsm(OracleModel& chrsm, int copies_per_query, int query_budget) {
  return ApproxSwapOracle(chrsm, copies_per_query, query_budget);
}

// ---------------------------------------------------------------------------
// chrsm_from_swap
// ---------------------------------------------------------------------------

Vec chrsm_from_swap(OracleModel& swap_oracle) {
  const Eigen::Index d = swap_oracle.register_dim();
  RegisterLayout layout({2, d});

  Vec qubit_minus(2);
  qubit_minus << 1.0 / std::numbers::sqrt2, -1.0 / std::numbers::sqrt2;
  Vec v = kron(qubit_minus, flag_vector(d));

  v = swap_oracle.apply_controlled_swap(v, layout, 0, 1);

  // X on the control qubit conditioned on the register being the flag.
  Vec flipped = Vec::Zero(v.size());
  for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
    const Eigen::Index q = idx / d;
    const Eigen::Index r = idx % d;
    flipped(r == 0 ? (1 - q) * d + r : idx) += v(idx);
  }

  // The control is now deterministically |1>; the register factors out.
  Vec out(d);
  for (Eigen::Index r = 0; r < d; ++r) out(r) = flipped(d + r);
  const double leak = flipped.head(d).squaredNorm();
  if (leak > 1e-24) throw std::logic_error("chrsm_from_swap: output register not disentangled");
  out.normalize();
  return out;
}

}  // namespace qlab
