#include <Eigen/Eigenvalues>
#include <array>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "qlab/combinatorics.hpp"
#include "qlab/hilbert.hpp"

using namespace qlab;

namespace {

Vec basis_vec(Eigen::Index dim, Eigen::Index k) { return Vec::Unit(dim, k); }

Mat random_hermitian(Eigen::Index d, RngStream& rng) {
  Mat m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Cx(rng.normal(), rng.normal());
  return Mat(0.5 * (m + m.adjoint()));
}

Mat random_density(Eigen::Index d, RngStream& rng) {
  Mat g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = Cx(rng.normal(), rng.normal());
  Mat rho = g * g.adjoint();
  return rho / rho.trace();
}

}  // namespace

TEST_CASE("rng streams are deterministic and forkable") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RngStream c = a.fork(7), d = b.fork(7);
  CHECK(c.next_u64() == d.next_u64());
  RngStream e = a.fork(8);
  CHECK(c.next_u64() != e.next_u64());
}

TEST_CASE("rng uniform and normal moments") {
  RngStream rng(7);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sum2 / n - 1.0) < 0.03);
}

TEST_CASE("tensor basics") {
  PureState zero = PureState::basis(2, 0);
  PureState one = PureState::basis(2, 1);
  PureState prod = tensor(zero, one);
  CHECK(prod.dim() == 4);
  CHECK(std::abs(prod.amplitudes()(1) - 1.0) < 1e-15);  // index 0*2+1

  // Identity register is a no-op factor.
  RngStream rng(1);
  Mat m = random_hermitian(3, rng);
  Mat lifted = kron(Mat(Mat::Identity(1, 1)), m);
  CHECK((lifted - m).cwiseAbs().maxCoeff() == 0.0);

  // Dimension arithmetic.
  CHECK(kron(Vec(Vec::Ones(2).normalized()), Vec(Vec::Ones(3).normalized())).size() == 6);
}

TEST_CASE("partial trace: product, full trace, Bell pair") {
  RngStream rng(3);
  Mat rho_m = random_density(2, rng);
  Mat sigma_m = random_density(3, rng);
  DensityOperator joint(kron(rho_m, sigma_m));
  RegisterLayout layout({2, 3});

  const std::size_t keep0[1] = {0};
  DensityOperator back = partial_trace(joint, layout, std::span(keep0, 1));
  CHECK((back.matrix() - rho_m).cwiseAbs().maxCoeff() < 1e-12);

  // Trace out everything: scalar 1.
  DensityOperator all_gone = partial_trace(joint, layout, {});
  CHECK(all_gone.dim() == 1);
  CHECK(std::abs(all_gone.matrix()(0, 0) - 1.0) < 1e-12);

  // Bell pair reduced state, against the 4x4 hand computation
  // |00>+|11> -> diag(1/2, 1/2).
  Vec bell = (kron(basis_vec(2, 0), basis_vec(2, 0)) + kron(basis_vec(2, 1), basis_vec(2, 1))) /
             std::numbers::sqrt2;
  DensityOperator bell_rho = DensityOperator::from_pure(bell);
  RegisterLayout qubits({2, 2});
  DensityOperator half = partial_trace(bell_rho, qubits, std::span(keep0, 1));
  Mat expected = 0.5 * Mat::Identity(2, 2);
  CHECK((half.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS(partial_trace(bell_rho, RegisterLayout({2, 3}), std::span(keep0, 1)));
}

TEST_CASE("partial transpose: full, involution, product PSD") {
  RngStream rng(5);
  RegisterLayout layout({2, 3});
  Mat rho = random_density(6, rng);

  const std::size_t both[2] = {0, 1};
  Mat full_t = partial_transpose(rho, layout, std::span(both, 2));
  CHECK((full_t - rho.transpose()).cwiseAbs().maxCoeff() < 1e-15);

  const std::size_t second[1] = {1};
  Mat once = partial_transpose(rho, layout, std::span(second, 1));
  Mat twice = partial_transpose(once, layout, std::span(second, 1));
  CHECK((twice - rho).cwiseAbs().maxCoeff() == 0.0);

  // Product state: the partial transpose is rho (x) sigma^T, still PSD.
  Mat a = random_density(2, rng), b = random_density(3, rng);
  Mat pt = partial_transpose(kron(a, b), layout, std::span(second, 1));
  CHECK((pt - kron(a, Mat(b.transpose()))).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(eigvals_hermitian(pt).minCoeff() > -1e-12);
}

TEST_CASE("trace norm: block-ones sqrt(MN), identity, random Hermitian") {
  // Block of ones in the top-right corner, all M, N <= 8.
  for (int m = 1; m <= 8; ++m)
    for (int n = 1; n <= 8; ++n) {
      Mat v = Mat::Zero(m + n, m + n);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) v(i, m + j) = 1.0;
      CHECK(std::abs(trace_norm(v) - std::sqrt(double(m) * n)) < 1e-10);
    }

  CHECK(std::abs(trace_norm(Mat(Mat::Identity(7, 7))) - 7.0) < 1e-12);

  // Independent oracle: Eigen's own eigensolver on a random Hermitian.
  RngStream rng(11);
  Mat h = random_hermitian(9, rng);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const double expected = es.eigenvalues().cwiseAbs().sum();
  CHECK(std::abs(trace_norm(h) - expected) < 1e-10);
  CHECK(std::abs(trace_norm_hermitian(h) - expected) < 1e-10);
  CHECK(std::abs(trace_norm(Mat(h.transpose())) - expected) < 1e-10);
  CHECK(std::abs(trace_norm(Mat(h.adjoint())) - expected) < 1e-10);
}

TEST_CASE("symmetric projector") {
  // k = 1: identity.
  CHECK((sym_projector(3, 1) - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);

  for (int d = 2; d <= 3; ++d)
    for (int k = 2; k <= 4; ++k) {
      Mat p = sym_projector(d, k);
      CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((p - p.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
      // Trace equals the number of size-k multisets over [d], counted by
      // explicit enumeration.
      const double count = static_cast<double>(multisets_of_size(d, k).size());
      CHECK(std::abs(p.trace().real() - count) < 1e-9);
    }

  // Antisymmetric vectors are annihilated.
  Mat p = sym_projector(3, 2);
  Vec anti = kron(basis_vec(3, 0), basis_vec(3, 2)) - kron(basis_vec(3, 2), basis_vec(3, 0));
  CHECK((p * anti).norm() < 1e-12);

  // Commutes with every register permutation for k <= 4.
  for (int k = 2; k <= 4; ++k) {
    const int d = 2;
    const Eigen::Index dim = Eigen::Index(1) << k;
    Mat proj = sym_projector(d, k);
    RegisterLayout lay(std::vector<Eigen::Index>(static_cast<std::size_t>(k), d));
    std::vector<std::size_t> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      Mat pmat = Mat::Zero(dim, dim);
      for (Eigen::Index col = 0; col < dim; ++col)
        pmat.col(col) = permute_registers(Vec(Vec::Unit(dim, col)), lay, perm);
      CHECK((pmat * proj - proj * pmat).cwiseAbs().maxCoeff() < 1e-12);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("swap test") {
  Vec a = basis_vec(3, 1);
  CHECK(swap_test(a, a) == doctest::Approx(1.0));

  // Orthogonal pure pair: (1 + |<a|b>|^2)/2 = 1/2.
  Vec b = basis_vec(3, 2);
  CHECK(swap_test(a, b) == doctest::Approx(0.5));

  // Maximally mixed qubits: (1 + Tr[SWAP/4])/2 = (1 + 2/4)/2 = 3/4.
  DensityOperator mixed(kron(Mat(0.5 * Mat::Identity(2, 2)), Mat(0.5 * Mat::Identity(2, 2))));
  CHECK(swap_test(mixed, RegisterLayout({2, 2})) == doctest::Approx(0.75));

  // Product inputs rho (x) rho stay in [1/2, 1].
  RngStream rng(13);
  for (int i = 0; i < 10; ++i) {
    Mat rho = random_density(3, rng);
    DensityOperator joint(kron(rho, rho));
    const double p = swap_test(joint, RegisterLayout({3, 3}));
    CHECK(p >= 0.5 - 1e-12);
    CHECK(p <= 1.0 + 1e-12);
  }

  CHECK_THROWS(swap_test(mixed, RegisterLayout({4, 1})));
}

TEST_CASE("haar sampling") {
  RngStream rng(17);
  // n = 0: the unique dimension-1 state.
  PureState s0 = sample_haar(0, rng);
  CHECK(s0.dim() == 1);
  CHECK(std::abs(std::abs(s0.amplitudes()(0)) - 1.0) < 1e-12);

  for (int i = 0; i < 50; ++i)
    CHECK(std::abs(sample_haar(2, rng).amplitudes().squaredNorm() - 1.0) < 1e-12);

  // First moment: E[|phi><phi|] ~= I/2 entrywise at 1e5 samples.
  Mat acc = Mat::Zero(2, 2);
  const int samples = 100000;
  for (int i = 0; i < samples; ++i) {
    Vec v = sample_haar(1, rng).amplitudes();
    acc += v * v.adjoint();
  }
  acc /= samples;
  CHECK((acc - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("binomial sampling") {
  RngStream rng(19);
  CHECK(sample_binomial(0, rng).count == 0);
  CHECK(binomial_pmf(3, 1) == doctest::Approx(3.0 / 8.0));

  const int trials = 100000, t = 6;
  std::array<long, 7> counts{};
  double mean = 0.0;
  for (int i = 0; i < trials; ++i) {
    const int c = sample_binomial(t, rng).count;
    ++counts[static_cast<std::size_t>(c)];
    mean += c;
  }
  mean /= trials;
  const double sigma = std::sqrt(t * 0.25 / trials);
  CHECK(std::abs(mean - t / 2.0) < 3 * sigma);

  // Chi-squared against the exact pmf; critical value for df = 6 at p = 0.001
  // is 22.46.
  double chi2 = 0.0;
  for (int c = 0; c <= t; ++c) {
    const double expected = trials * binomial_pmf(t, c);
    const double diff = counts[static_cast<std::size_t>(c)] - expected;
    chi2 += diff * diff / expected;
  }
  CHECK(chi2 < 22.46);
}

TEST_CASE("measurement") {
  RngStream rng(23);
  // Measuring {|0><0|, rest} on |0>.
  Mat p0 = Mat::Zero(2, 2);
  p0(0, 0) = 1.0;
  Mat rest = Mat::Identity(2, 2) - p0;
  std::array<Mat, 2> family{p0, rest};
  DensityOperator zero = DensityOperator::from_pure(basis_vec(2, 0));
  auto outcome = apply_measurement(zero, family, rng);
  CHECK(outcome.index == 0);
  CHECK(outcome.probability == doctest::Approx(1.0));

  // |phi-> = (|0> - |phi>)/sqrt(2) in dim 3: flag outcome probability 1/2.
  Vec phi_minus(3);
  phi_minus << 1.0 / std::numbers::sqrt2, 0.0, -1.0 / std::numbers::sqrt2;
  Mat f0 = Mat::Zero(3, 3);
  f0(0, 0) = 1.0;
  std::array<Mat, 2> fam3{f0, Mat(Mat::Identity(3, 3) - f0)};
  long zero_outcomes = 0;
  const int reps = 20000;
  for (int i = 0; i < reps; ++i) {
    auto out = apply_measurement(DensityOperator::from_pure(phi_minus), fam3, rng);
    zero_outcomes += out.index == 0 ? 1 : 0;
    if (i == 0) CHECK(out.probability == doctest::Approx(0.5));
  }
  CHECK(std::abs(zero_outcomes / double(reps) - 0.5) < 4 * std::sqrt(0.25 / reps));

  // Non-complete family is rejected.
  std::array<Mat, 1> bad{p0};
  CHECK_THROWS(apply_measurement(zero, bad, rng));

  // trace_distance(rho, rho) = 0.
  Mat rho = random_density(4, rng);
  CHECK(trace_distance(DensityOperator(rho), DensityOperator(rho)) < 1e-14);
}

TEST_CASE("density operator invariants on operation outputs") {
  RngStream rng(29);
  RegisterLayout layout({3, 3});
  Mat joint = random_density(9, rng);
  const std::size_t keep[1] = {1};
  DensityOperator red = partial_trace(DensityOperator(joint), layout, std::span(keep, 1));
  red.validate_full();
  CHECK(std::abs(red.matrix().trace().real() - 1.0) < 1e-10);
}

TEST_CASE("state ensembles: exact trace distance matches the dense route") {
  RngStream rng(31);
  const Eigen::Index dim = 40;
  auto random_ensemble = [&](int parts) {
    StateEnsemble e;
    double left = 1.0;
    for (int i = 0; i < parts; ++i) {
      Vec v(dim);
      for (Eigen::Index k = 0; k < dim; ++k) v(k) = Cx(rng.normal(), rng.normal());
      v.normalize();
      const double w = (i + 1 == parts) ? left : left * rng.uniform();
      left -= (i + 1 == parts) ? 0.0 : w;
      e.append(w, v);
    }
    return e;
  };
  for (int rep = 0; rep < 5; ++rep) {
    StateEnsemble a = random_ensemble(4), b = random_ensemble(6);
    const double fast = trace_distance(a, b);
    const double dense = 0.5 * trace_norm_hermitian(a.to_density() - b.to_density());
    CHECK(std::abs(fast - dense) < 1e-10);
  }

  StateEnsemble same;
  same.append(1.0, Vec(basis_vec(4, 2)));
  CHECK(trace_distance(same, same) < 1e-14);
}

TEST_CASE("register permutation and subset operators") {
  RngStream rng(37);
  RegisterLayout lay({2, 3, 2});
  Vec v(12);
  for (Eigen::Index i = 0; i < 12; ++i) v(i) = Cx(rng.normal(), rng.normal());
  v.normalize();

  // Permuting twice by inverse orders restores the state.
  std::vector<std::size_t> order{2, 0, 1};
  Vec moved = permute_registers(v, lay, order);
  std::vector<std::size_t> inverse{1, 2, 0};
  Vec back = permute_registers(moved, lay.sublayout(order), inverse);
  CHECK((back - v).norm() < 1e-14);

  // apply_subset_op against the dense kron lift.
  Mat op = random_hermitian(6, rng);
  const std::size_t regs[2] = {0, 1};
  Vec fast = apply_subset_op(v, lay, std::span(regs, 2), op);
  Mat dense = kron(op, Mat(Mat::Identity(2, 2)));
  CHECK((fast - dense * v).norm() < 1e-12);

  // Non-adjacent subset, different order.
  Mat op2 = random_hermitian(4, rng);
  const std::size_t regs2[2] = {2, 0};
  Vec fast2 = apply_subset_op(v, lay, std::span(regs2, 2), op2);
  // Oracle: permute (2,0,1), apply on first two, permute back.
  std::vector<std::size_t> to{2, 0, 1};
  Vec w = permute_registers(v, lay, to);
  w = kron(op2, Mat(Mat::Identity(3, 3))) * w;
  std::vector<std::size_t> back_order{1, 2, 0};
  Vec oracle = permute_registers(w, lay.sublayout(to), back_order);
  CHECK((fast2 - oracle).norm() < 1e-12);
}
