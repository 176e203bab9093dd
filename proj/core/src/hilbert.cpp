#include "qlab/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qlab/combinatorics.hpp"

namespace qlab {

namespace {

constexpr double kNormTol = 1e-12;
constexpr double kHermTol = 1e-10;
constexpr double kTraceTol = 1e-10;

void check_layout_matches(const RegisterLayout& layout, Eigen::Index dim, const char* who) {
  if (layout.total_dim() != dim)
    throw std::invalid_argument(std::string(who) + ": layout does not match operand dimension");
}

}  // namespace

// ---------------------------------------------------------------------------
// RegisterLayout
// ---------------------------------------------------------------------------

RegisterLayout::RegisterLayout(std::vector<Eigen::Index> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("RegisterLayout: no registers");
  strides_.resize(dims_.size());
  total_ = 1;
  for (auto d : dims_)
    if (d < 1) throw std::invalid_argument("RegisterLayout: register dimension < 1");
  for (std::size_t r = dims_.size(); r-- > 0;) {
    strides_[r] = total_;
    total_ *= dims_[r];
  }
}

Eigen::Index RegisterLayout::flat(std::span<const Eigen::Index> digits) const {
  Eigen::Index f = 0;
  for (std::size_t r = 0; r < dims_.size(); ++r) f += digits[r] * strides_[r];
  return f;
}

void RegisterLayout::unflat(Eigen::Index flat_index, std::span<Eigen::Index> digits_out) const {
  for (std::size_t r = 0; r < dims_.size(); ++r) {
    digits_out[r] = flat_index / strides_[r];
    flat_index %= strides_[r];
  }
}

RegisterLayout RegisterLayout::sublayout(std::span<const std::size_t> registers) const {
  std::vector<Eigen::Index> dims;
  dims.reserve(registers.size());
  for (auto r : registers) dims.push_back(dim(r));
  return RegisterLayout(std::move(dims));
}

// ---------------------------------------------------------------------------
// PureState / DensityOperator
// ---------------------------------------------------------------------------

PureState::PureState(Vec amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() < 1) throw std::invalid_argument("PureState: empty amplitude vector");
  const double n2 = amps_.squaredNorm();
  if (std::abs(n2 - 1.0) > kNormTol)
    throw std::invalid_argument("PureState: squared norm deviates from 1 by " +
                                std::to_string(std::abs(n2 - 1.0)));
}

PureState PureState::basis(Eigen::Index dim, Eigen::Index index) {
  if (index < 0 || index >= dim) throw std::out_of_range("PureState::basis: index out of range");
  Vec v = Vec::Zero(dim);
  v(index) = 1.0;
  return PureState(std::move(v));
}

DensityOperator::DensityOperator(Mat matrix) : m_(std::move(matrix)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("DensityOperator: not square");
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
    throw std::invalid_argument("DensityOperator: not Hermitian");
  if (std::abs(m_.trace() - Cx(1.0, 0.0)) > kTraceTol)
    throw std::invalid_argument("DensityOperator: trace != 1");
}

DensityOperator DensityOperator::from_pure(const Vec& state) {
  return DensityOperator(state * state.adjoint());
}

void DensityOperator::validate_full(double eig_tol) const {
  RVec ev = eigvals_hermitian(m_);
  if (ev.minCoeff() < -eig_tol)
    throw std::runtime_error("DensityOperator: negative eigenvalue " +
                             std::to_string(ev.minCoeff()));
}

// ---------------------------------------------------------------------------
// Tensor algebra
// ---------------------------------------------------------------------------

PureState tensor(const PureState& a, const PureState& b) {
  return PureState(kron(a.amplitudes(), b.amplitudes()));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator(kron(a.matrix(), b.matrix()));
}

Mat reduced_density(const Vec& state, const RegisterLayout& layout,
                    std::span<const std::size_t> keep) {
  check_layout_matches(layout, state.size(), "reduced_density");
  std::vector<std::size_t> traced;
  for (std::size_t r = 0; r < layout.size(); ++r)
    if (std::find(keep.begin(), keep.end(), r) == keep.end()) traced.push_back(r);

  auto keep_layout = keep.empty() ? RegisterLayout({1}) : layout.sublayout(keep);
  auto traced_layout = traced.empty() ? RegisterLayout({1}) : layout.sublayout(traced);

  const Eigen::Index dk = keep_layout.total_dim();
  const Eigen::Index dt = traced_layout.total_dim();

  // flat(full) = sum over keep digits + traced digits with the full strides.
  std::vector<Eigen::Index> kd(std::max<std::size_t>(keep.size(), 1)),
      td(std::max<std::size_t>(traced.size(), 1));
  auto full_index = [&](Eigen::Index ki, Eigen::Index ti) {
    Eigen::Index f = 0;
    if (!keep.empty()) {
      keep_layout.unflat(ki, std::span<Eigen::Index>(kd.data(), keep.size()));
      for (std::size_t i = 0; i < keep.size(); ++i) f += kd[i] * layout.stride(keep[i]);
    }
    if (!traced.empty()) {
      traced_layout.unflat(ti, std::span<Eigen::Index>(td.data(), traced.size()));
      for (std::size_t i = 0; i < traced.size(); ++i) f += td[i] * layout.stride(traced[i]);
    }
    return f;
  };

  Mat out = Mat::Zero(dk, dk);
  for (Eigen::Index a = 0; a < dk; ++a)
    for (Eigen::Index b = 0; b < dk; ++b) {
      Cx acc = 0.0;
      for (Eigen::Index t = 0; t < dt; ++t)
        acc += state(full_index(a, t)) * std::conj(state(full_index(b, t)));
      out(a, b) = acc;
    }
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, const RegisterLayout& layout,
                              std::span<const std::size_t> keep) {
  check_layout_matches(layout, rho.dim(), "partial_trace");
  std::vector<std::size_t> traced;
  for (std::size_t r = 0; r < layout.size(); ++r)
    if (std::find(keep.begin(), keep.end(), r) == keep.end()) traced.push_back(r);

  auto keep_layout = keep.empty() ? RegisterLayout({1}) : layout.sublayout(keep);
  auto traced_layout = traced.empty() ? RegisterLayout({1}) : layout.sublayout(traced);
  const Eigen::Index dk = keep_layout.total_dim();
  const Eigen::Index dt = traced_layout.total_dim();

  std::vector<Eigen::Index> kd(std::max<std::size_t>(keep.size(), 1)),
      td(std::max<std::size_t>(traced.size(), 1));
  auto full_index = [&](Eigen::Index ki, Eigen::Index ti) {
    Eigen::Index f = 0;
    if (!keep.empty()) {
      keep_layout.unflat(ki, std::span<Eigen::Index>(kd.data(), keep.size()));
      for (std::size_t i = 0; i < keep.size(); ++i) f += kd[i] * layout.stride(keep[i]);
    }
    if (!traced.empty()) {
      traced_layout.unflat(ti, std::span<Eigen::Index>(td.data(), traced.size()));
      for (std::size_t i = 0; i < traced.size(); ++i) f += td[i] * layout.stride(traced[i]);
    }
    return f;
  };

  Mat out = Mat::Zero(dk, dk);
  const Mat& in = rho.matrix();
  for (Eigen::Index a = 0; a < dk; ++a)
    for (Eigen::Index b = 0; b < dk; ++b) {
      Cx acc = 0.0;
      for (Eigen::Index t = 0; t < dt; ++t) acc += in(full_index(a, t), full_index(b, t));
      out(a, b) = acc;
    }
  return DensityOperator(std::move(out));
}

Mat partial_transpose(const Mat& m, const RegisterLayout& layout,
                      std::span<const std::size_t> registers) {
  check_layout_matches(layout, m.rows(), "partial_transpose");
  if (m.rows() != m.cols()) throw std::invalid_argument("partial_transpose: not square");

  const Eigen::Index n = m.rows();
  const std::size_t r = layout.size();
  std::vector<bool> flip(r, false);
  for (auto reg : registers) flip.at(reg) = true;

  std::vector<Eigen::Index> rd(r), cd(r);
  Mat out(n, n);
  for (Eigen::Index row = 0; row < n; ++row) {
    layout.unflat(row, rd);
    for (Eigen::Index col = 0; col < n; ++col) {
      layout.unflat(col, cd);
      Eigen::Index nr = 0, nc = 0;
      for (std::size_t k = 0; k < r; ++k) {
        nr += (flip[k] ? cd[k] : rd[k]) * layout.stride(k);
        nc += (flip[k] ? rd[k] : cd[k]) * layout.stride(k);
      }
      out(nr, nc) = m(row, col);
    }
  }
  return out;
}

Vec apply_to_register(const Vec& state, const RegisterLayout& layout, std::size_t r,
                      const Mat& op) {
  check_layout_matches(layout, state.size(), "apply_to_register");
  const Eigen::Index d = layout.dim(r);
  if (op.rows() != d || op.cols() != d)
    throw std::invalid_argument("apply_to_register: operator does not match register dim");

  const Eigen::Index stride = layout.stride(r);
  const Eigen::Index block = stride * d;
  Vec out = Vec::Zero(state.size());
  for (Eigen::Index base = 0; base < state.size(); base += block) {
    for (Eigen::Index inner = 0; inner < stride; ++inner) {
      for (Eigen::Index i = 0; i < d; ++i) {
        Cx acc = 0.0;
        for (Eigen::Index j = 0; j < d; ++j)
          acc += op(i, j) * state(base + inner + j * stride);
        out(base + inner + i * stride) = acc;
      }
    }
  }
  return out;
}

Vec permute_registers(const Vec& state, const RegisterLayout& layout,
                      std::span<const std::size_t> new_order) {
  check_layout_matches(layout, state.size(), "permute_registers");
  if (new_order.size() != layout.size())
    throw std::invalid_argument("permute_registers: order must list every register");
  RegisterLayout out_layout = layout.sublayout(new_order);
  Vec out(state.size());
  std::vector<Eigen::Index> digits(layout.size()), permuted(layout.size());
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    layout.unflat(i, digits);
    for (std::size_t k = 0; k < new_order.size(); ++k) permuted[k] = digits[new_order[k]];
    out(out_layout.flat(permuted)) = state(i);
  }
  return out;
}

Vec apply_subset_op(const Vec& state, const RegisterLayout& layout,
                    std::span<const std::size_t> regs, const Mat& op) {
  check_layout_matches(layout, state.size(), "apply_subset_op");
  RegisterLayout sub = layout.sublayout(regs);
  if (op.rows() != sub.total_dim() || op.cols() != sub.total_dim())
    throw std::invalid_argument("apply_subset_op: operator does not match subset dims");

  const Eigen::Index n = state.size();
  const Eigen::Index sd = sub.total_dim();

  // offset(j) = flat-index contribution of subset digits j; rest(i) = i with
  // subset digits zeroed.
  std::vector<Eigen::Index> offsets(sd);
  std::vector<Eigen::Index> sub_digits(regs.size());
  for (Eigen::Index j = 0; j < sd; ++j) {
    sub.unflat(j, sub_digits);
    Eigen::Index off = 0;
    for (std::size_t k = 0; k < regs.size(); ++k) off += sub_digits[k] * layout.stride(regs[k]);
    offsets[j] = off;
  }

  std::vector<Eigen::Index> digits(layout.size());
  Vec out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    layout.unflat(i, digits);
    bool fiber_base = true;
    for (std::size_t k = 0; k < regs.size() && fiber_base; ++k)
      if (digits[regs[k]] != 0) fiber_base = false;
    if (!fiber_base) continue;
    // i is the base of its subset fiber; fill the whole fiber in one pass.
    for (Eigen::Index a = 0; a < sd; ++a) {
      Cx acc = 0.0;
      for (Eigen::Index b = 0; b < sd; ++b) acc += op(a, b) * state(i + offsets[b]);
      out(i + offsets[a]) = acc;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Norms, distances, projectors
// ---------------------------------------------------------------------------

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  return 0.5 * trace_norm_hermitian(a.matrix() - b.matrix());
}

Mat sym_projector(Eigen::Index d, int k) {
  if (d < 1 || k < 1) throw std::invalid_argument("sym_projector: d, k must be >= 1");
  std::vector<Eigen::Index> dims(static_cast<std::size_t>(k), d);
  RegisterLayout layout(dims);
  const Eigen::Index n = layout.total_dim();

  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  const double w = 1.0 / factorial(k);

  Mat out = Mat::Zero(n, n);
  std::vector<Eigen::Index> digits(k), permuted(k);
  do {
    for (Eigen::Index col = 0; col < n; ++col) {
      layout.unflat(col, digits);
      for (int i = 0; i < k; ++i) permuted[perm[i]] = digits[i];
      out(layout.flat(permuted), col) += w;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

Mat swap_operator(Eigen::Index d) {
  Mat s = Mat::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) s(j * d + i, i * d + j) = 1.0;
  return s;
}

double swap_test(const DensityOperator& joint, const RegisterLayout& layout) {
  if (layout.size() != 2 || layout.dim(0) != layout.dim(1))
    throw std::invalid_argument("swap_test: expected two equal registers");
  check_layout_matches(layout, joint.dim(), "swap_test");
  const Eigen::Index d = layout.dim(0);
  Cx tr = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) tr += joint.matrix()(i * d + j, j * d + i);
  if (std::abs(tr.imag()) > 1e-10)
    throw std::runtime_error("swap_test: Tr[SWAP rho] has imaginary part");
  return 0.5 * (1.0 + tr.real());
}

double swap_test(const Vec& a, const Vec& b) { return 0.5 * (1.0 + fidelity(a, b)); }

double fidelity(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("fidelity: dimension mismatch");
  return std::norm(a.dot(b));
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

PureState sample_haar(int n_qubits, RngStream& rng) {
  if (n_qubits < 0) throw std::invalid_argument("sample_haar: negative qubit count");
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = Cx(rng.normal(), rng.normal());
  v.normalize();
  return PureState(std::move(v));
}

BinomialSample sample_binomial(int trials, RngStream& rng) {
  if (trials < 0) throw std::invalid_argument("sample_binomial: negative trial count");
  int c = 0;
  for (int i = 0; i < trials; ++i) c += rng.bernoulli(0.5) ? 1 : 0;
  return BinomialSample{trials, c};
}

double binomial_pmf(int trials, int count) {
  return binom(trials, count) * std::pow(0.5, trials);
}

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

MeasurementOutcome apply_measurement(const DensityOperator& rho,
                                     std::span<const Mat> projectors, RngStream& rng) {
  if (projectors.empty()) throw std::invalid_argument("apply_measurement: empty family");
  Mat sum = Mat::Zero(rho.dim(), rho.dim());
  for (const auto& p : projectors) {
    if (p.rows() != rho.dim() || p.cols() != rho.dim())
      throw std::invalid_argument("apply_measurement: projector dimension mismatch");
    sum += p;
  }
  if ((sum - Mat::Identity(rho.dim(), rho.dim())).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("apply_measurement: projector family does not sum to identity");

  std::vector<double> probs(projectors.size());
  for (std::size_t i = 0; i < projectors.size(); ++i)
    probs[i] = std::max(0.0, (projectors[i] * rho.matrix()).trace().real());

  double u = rng.uniform() * std::accumulate(probs.begin(), probs.end(), 0.0);
  std::size_t pick = projectors.size() - 1;
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    if (u < probs[i]) {
      pick = i;
      break;
    }
    u -= probs[i];
  }

  const Mat& p = projectors[pick];
  Mat post = p * rho.matrix() * p.adjoint();
  const double prob = probs[pick];
  if (prob <= 0.0) throw std::runtime_error("apply_measurement: zero-probability branch drawn");
  post /= prob;
  return MeasurementOutcome{static_cast<int>(pick), prob, DensityOperator(std::move(post))};
}

std::vector<PureBranch> measure_branches(const Vec& state, std::span<const Mat> projectors) {
  std::vector<PureBranch> out;
  out.reserve(projectors.size());
  double total = 0.0;
  for (const auto& p : projectors) {
    Vec v = p * state;
    const double prob = v.squaredNorm();
    total += prob;
    if (prob > 0.0) v /= std::sqrt(prob);
    out.push_back(PureBranch{prob, std::move(v)});
  }
  if (std::abs(total - 1.0) > 1e-8)
    throw std::invalid_argument("measure_branches: branch probabilities sum to " +
                                std::to_string(total));
  return out;
}

// ---------------------------------------------------------------------------
// StateEnsemble
// ---------------------------------------------------------------------------

double StateEnsemble::total_weight() const {
  double w = 0.0;
  for (const auto& c : components) w += c.weight;
  return w;
}

void StateEnsemble::append(double weight, Vec state) {
  if (weight < 0.0) throw std::invalid_argument("StateEnsemble: negative weight");
  if (!components.empty() && state.size() != dim())
    throw std::invalid_argument("StateEnsemble: dimension mismatch");
  if (weight > 0.0) components.push_back(Component{weight, std::move(state)});
}

Mat StateEnsemble::to_density() const {
  if (components.empty()) throw std::runtime_error("StateEnsemble: empty");
  Mat out = Mat::Zero(dim(), dim());
  for (const auto& c : components) out.noalias() += c.weight * (c.state * c.state.adjoint());
  return out;
}

const Vec& StateEnsemble::sample(RngStream& rng) const {
  if (components.empty()) throw std::runtime_error("StateEnsemble: empty");
  double u = rng.uniform() * total_weight();
  for (const auto& c : components) {
    if (u < c.weight) return c.state;
    u -= c.weight;
  }
  return components.back().state;
}

double trace_distance(const StateEnsemble& a, const StateEnsemble& b) {
  if (a.components.empty() || b.components.empty())
    throw std::invalid_argument("trace_distance: empty ensemble");
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");

  const Eigen::Index d = a.dim();
  const Eigen::Index ra = static_cast<Eigen::Index>(a.components.size());
  const Eigen::Index rb = static_cast<Eigen::Index>(b.components.size());
  const Eigen::Index r = ra + rb;

  if (r >= d) {
    // Dense fallback; only reachable for small dimensions.
    Mat diff = a.to_density() - b.to_density();
    return 0.5 * trace_norm_hermitian(diff);
  }

  // diff = X S X^dagger with S = diag(+1,...,-1,...). A thin QR X = QR turns
  // the spectrum computation into an r x r Hermitian eigenproblem R S R^dag.
  Mat x(d, r);
  for (Eigen::Index i = 0; i < ra; ++i)
    x.col(i) = std::sqrt(a.components[i].weight) * a.components[i].state;
  for (Eigen::Index j = 0; j < rb; ++j)
    x.col(ra + j) = std::sqrt(b.components[j].weight) * b.components[j].state;

  Eigen::HouseholderQR<Mat> qr(x);
  Mat rfac = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  Mat small = rfac.leftCols(ra) * rfac.leftCols(ra).adjoint() -
              rfac.rightCols(rb) * rfac.rightCols(rb).adjoint();
  return 0.5 * eigvals_hermitian(small).cwiseAbs().sum();
}

}  // namespace qlab
