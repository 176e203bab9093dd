#include <numbers>

#include "doctest.h"
#include "qlab/combinatorics.hpp"
#include "qlab/oracles.hpp"

using namespace qlab;

TEST_CASE("balancedness") {
  // Haar is phase invariant at every moment order we exercise.
  CHECK(is_balanced(StateDistribution::haar(1), 3));
  CHECK(is_balanced(StateDistribution::haar(2), 4));

  // Point mass is never balanced.
  CHECK_FALSE(is_balanced(StateDistribution::fixed_basis(1, 2), 1));

  // Discrete phases with M levels vanish for 0 < |k| < M. Independent check:
  // sum the roots of unity directly.
  const int m = 5;
  for (int k = 1; k <= 4; ++k) {
    Cx acc = 0.0;
    for (int j = 0; j < m; ++j)
      acc += std::exp(Cx(0.0, 2.0 * std::numbers::pi * j * k / m));
    CHECK(std::abs(acc) / m < 1e-12);
  }
  CHECK(is_balanced(StateDistribution::discrete_phase(2, 5, 1), 4));
  CHECK_FALSE(is_balanced(StateDistribution::discrete_phase(2, 5, 1), 5));
}

TEST_CASE("embedding") {
  Vec one = Vec::Unit(2, 1);
  Vec e = embed(one);
  CHECK(e.size() == 3);
  CHECK(std::abs(e(0)) == 0.0);
  CHECK(std::abs(e(2) - 1.0) < 1e-15);

  RngStream rng(5);
  for (int i = 0; i < 20; ++i) {
    Vec phi = StateDistribution::haar(2).sample(rng);
    Vec emb = embed(phi);
    CHECK(std::abs(emb.dot(flag_vector(emb.size()))) == 0.0);
    CHECK(std::abs(emb.squaredNorm() - 1.0) < 1e-14);
  }
}

TEST_CASE("chrs and chrs- queries") {
  RngStream rng(7);
  OracleModel chrs(OracleKind::Chrs, StateDistribution::haar(2), rng);
  Vec q1 = chrs.query_chrs();
  Vec q2 = chrs.query_chrs();
  CHECK(chrs.query_count() == 2);
  // Two queries produce the same copy; the joint is a product phi (x) phi.
  CHECK((q1 - q2).norm() == 0.0);

  OracleModel fixed = OracleModel::with_hidden(OracleKind::Chrs, embed(Vec(Vec::Unit(2, 0))));
  CHECK((fixed.query_chrs() - embed(Vec(Vec::Unit(2, 0)))).norm() == 0.0);

  OracleModel chrsm(OracleKind::ChrsMinus, StateDistribution::haar(2), rng);
  Vec minus = chrsm.query_chrsm();
  CHECK(std::abs(std::norm(minus(0)) - 0.5) < 1e-12);
  CHECK(fidelity(minus, chrsm.query_chrsm()) == doctest::Approx(1.0));

  OracleModel fixed_minus =
      OracleModel::with_hidden(OracleKind::ChrsMinus, embed(Vec(Vec::Unit(2, 1))));
  Vec fm = fixed_minus.query_chrsm();
  Vec expected(3);
  expected << 1.0 / std::numbers::sqrt2, 0.0, -1.0 / std::numbers::sqrt2;
  CHECK((fm - expected).norm() < 1e-14);

  CHECK_THROWS(chrs.query_chrsm());
  CHECK_THROWS(chrsm.query_chrs());
}

TEST_CASE("swap oracle") {
  RngStream rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    Vec phi = embed(StateDistribution::haar(2).sample(rng));
    OracleModel swap = OracleModel::with_hidden(OracleKind::Swap, phi);
    Mat u = swap.swap_unitary();
    const Eigen::Index d = phi.size();

    // Unitary and Hermitian.
    CHECK((u * u.adjoint() - Mat::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((u - u.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

    // Swaps flag and phi.
    CHECK((u * flag_vector(d) - phi).norm() < 1e-12);
    CHECK((u * phi - flag_vector(d)).norm() < 1e-12);

    // Equals the reflection I - 2|phi-><phi-|.
    Vec minus = minus_state(phi);
    Mat refl = Mat::Identity(d, d) - 2.0 * (minus * minus.adjoint());
    CHECK((u - refl).cwiseAbs().maxCoeff() < 1e-12);

    // Identity on the orthogonal complement of span{flag, phi}.
    Vec probe(d);
    for (Eigen::Index i = 0; i < d; ++i) probe(i) = Cx(rng.normal(), rng.normal());
    probe -= flag_vector(d).dot(probe) * flag_vector(d);
    probe -= phi.dot(probe) * phi;
    if (probe.norm() > 1e-9) {
      probe.normalize();
      CHECK((u * probe - probe).norm() < 1e-10);
    }
  }
}

TEST_CASE("swap on a register of a joint state") {
  RngStream rng(13);
  Vec phi = embed(StateDistribution::haar(1).sample(rng));
  OracleModel swap = OracleModel::with_hidden(OracleKind::Swap, phi);
  const Eigen::Index d = phi.size();

  RegisterLayout layout({d, d});
  Vec joint = kron(flag_vector(d), phi);
  Vec swapped = swap.apply_swap(joint, layout, 0);
  CHECK((swapped - kron(phi, phi)).norm() < 1e-12);
  Vec twice = swap.apply_swap(swapped, layout, 0);
  CHECK((twice - joint).norm() < 1e-12);
  CHECK(swap.query_count() == 2);

  CHECK_THROWS(swap.apply_swap(joint, RegisterLayout({d * d}), 0));
}

TEST_CASE("haar moments match Monte Carlo") {
  RngStream rng(17);
  StateDistribution haar = StateDistribution::haar(1);
  Mat exact = haar.equal_count_moment(2);
  Mat mc = Mat::Zero(4, 4);
  const int samples = 20000;
  for (int i = 0; i < samples; ++i) {
    Vec v = haar.sample(rng);
    Vec vv = kron(v, v);
    mc += vv * vv.adjoint();
  }
  mc /= samples;
  CHECK((mc - exact).cwiseAbs().maxCoeff() < 0.03);

  // Unequal ket/bra countsvanish on average: E[phi] ~ 0.
  Vec first = Vec::Zero(2);
  for (int i = 0; i < samples; ++i) first += haar.sample(rng);
  CHECK((first / samples).norm() < 0.02);
}

TEST_CASE("finite-support moments are exact averages") {
  StateDistribution phase = StateDistribution::discrete_phase(1, 4, 2);
  // Equal-count moment of a phased basis state is the basis projector power.
  Mat m2 = phase.equal_count_moment(2);
  Vec base = kron(Vec(Vec::Unit(2, 1)), Vec(Vec::Unit(2, 1)));
  CHECK((m2 - base * base.adjoint()).cwiseAbs().maxCoeff() < 1e-14);

  StateEnsemble sup = phase.support();
  CHECK(sup.components.size() == 4);
  CHECK(sup.total_weight() == doctest::Approx(1.0));
}

TEST_CASE("distribution serialization round trips") {
  auto round = [](const StateDistribution& d) {
    StateDistribution back = StateDistribution::parse(d.serialize());
    CHECK(back.serialize() == d.serialize());
  };
  round(StateDistribution::haar(3));
  round(StateDistribution::discrete_phase(2, 6, 3));
  round(StateDistribution::fixed_basis(1, 1));
  CHECK_THROWS(StateDistribution::parse("kind=unknown n=2"));
  CHECK_THROWS(StateDistribution::parse("kind=haar"));
}
