#include "qlab/typestates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "qlab/combinatorics.hpp"

namespace qlab {

TypeMultiset::TypeMultiset(std::vector<int> syms) : symbols(std::move(syms)) {
  std::sort(symbols.begin(), symbols.end());
  for (int s : symbols)
    if (s < 1) throw std::invalid_argument("TypeMultiset: symbols must be >= 1");
}

bool TypeMultiset::collision_free() const {
  return std::adjacent_find(symbols.begin(), symbols.end()) == symbols.end();
}

TypeMultiset TypeMultiset::minus(const TypeMultiset& sub) const {
  std::vector<int> rest;
  std::size_t j = 0;
  for (int s : symbols) {
    if (j < sub.symbols.size() && sub.symbols[j] == s) {
      ++j;
      continue;
    }
    rest.push_back(s);
  }
  if (j != sub.symbols.size()) throw std::invalid_argument("TypeMultiset::minus: not a subset");
  return TypeMultiset(std::move(rest));
}

std::vector<TypeMultiset> all_types(int N, int t) {
  std::vector<TypeMultiset> out;
  for (auto& m : multisets_of_size(N, t)) {
    for (auto& s : m) ++s;  // shift 0-based to symbols [1..N]
    out.emplace_back(std::move(m));
  }
  return out;
}

std::vector<TypeMultiset> collision_free_types(int N, int t) {
  std::vector<TypeMultiset> out;
  for (auto& s : subsets_of_size(N, t)) {
    for (auto& x : s) ++x;
    out.emplace_back(std::move(s));
  }
  return out;
}

std::vector<TypeMultiset> sub_multisets(const TypeMultiset& T, int size) {
  // Choose a sub-multiplicity for every distinct symbol.
  std::vector<std::pair<int, int>> groups;  // (symbol, multiplicity)
  for (int s : T.symbols) {
    if (!groups.empty() && groups.back().first == s) ++groups.back().second;
    else groups.emplace_back(s, 1);
  }
  std::vector<TypeMultiset> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, std::size_t g, int remaining) -> void {
    if (g == groups.size()) {
      if (remaining == 0) out.emplace_back(cur);
      return;
    }
    const auto [sym, mult] = groups[g];
    for (int take = 0; take <= std::min(mult, remaining); ++take) {
      for (int i = 0; i < take; ++i) cur.push_back(sym);
      self(self, g + 1, remaining - take);
      for (int i = 0; i < take; ++i) cur.pop_back();
    }
  };
  rec(rec, 0, size);
  return out;
}

Vec type_vector(const TypeMultiset& T, int N) {
  const int t = T.size();
  if (t < 1) throw std::invalid_argument("type_vector: empty type");
  for (int s : T.symbols)
    if (s > N) throw std::invalid_argument("type_vector: symbol exceeds N");
  Eigen::Index dim = 1;
  for (int i = 0; i < t; ++i) dim *= N;

  RegisterLayout layout(std::vector<Eigen::Index>(static_cast<std::size_t>(t), N));
  Vec out = Vec::Zero(dim);
  std::vector<int> arr = T.symbols;
  std::vector<Eigen::Index> digits(static_cast<std::size_t>(t));
  long count = 0;
  do {
    for (int i = 0; i < t; ++i) digits[static_cast<std::size_t>(i)] = arr[static_cast<std::size_t>(i)] - 1;
    out(layout.flat(digits)) = 1.0;
    ++count;
  } while (std::next_permutation(arr.begin(), arr.end()));
  out /= std::sqrt(static_cast<double>(count));
  return out;
}

namespace {

// Shared builder: uniform superposition over strings whose nonzero multiset
// is T, nonzero slots constrained per block. zero_allowed marks B slots;
// fills, when non-null, pin the nonzero count inside each block's B slots.
Vec build_zero_state(const TypeMultiset& T, int N, const std::vector<bool>& zero_allowed,
                     const std::vector<std::pair<std::vector<int>, int>>* per_block_b_slots) {
  const int regs = static_cast<int>(zero_allowed.size());
  if (regs == 0) {
    // Zero registers carry only the empty type, as the scalar 1.
    if (T.size() != 0) throw std::invalid_argument("zero_state: |T| outside [#A, #A+#B]");
    return Vec::Ones(1);
  }
  for (int s : T.symbols)
    if (s > N) throw std::invalid_argument("zero_state: symbol exceeds N");

  std::vector<int> a_slots, b_slots;
  for (int r = 0; r < regs; ++r) (zero_allowed[static_cast<std::size_t>(r)] ? b_slots : a_slots).push_back(r);

  const int need_b = T.size() - static_cast<int>(a_slots.size());
  if (need_b < 0 || need_b > static_cast<int>(b_slots.size()))
    throw std::invalid_argument("zero_state: |T| outside [#A, #A+#B]");

  RegisterLayout layout(std::vector<Eigen::Index>(static_cast<std::size_t>(regs), N + 1));
  Vec out = Vec::Zero(layout.total_dim());

  // Enumerate the sets of B slots that carry nonzeros.
  std::vector<std::vector<int>> choices;
  if (per_block_b_slots == nullptr) {
    for (const auto& pick : subsets_of_size(static_cast<int>(b_slots.size()), need_b)) {
      std::vector<int> chosen;
      for (int i : pick) chosen.push_back(b_slots[static_cast<std::size_t>(i)]);
      choices.push_back(std::move(chosen));
    }
  } else {
    // Cartesian product of per-block picks with pinned counts.
    choices.emplace_back();
    for (const auto& [slots, fill] : *per_block_b_slots) {
      if (fill < 0 || fill > static_cast<int>(slots.size()))
        throw std::invalid_argument("zero_state: infeasible block fill");
      std::vector<std::vector<int>> next;
      for (const auto& prefix : choices)
        for (const auto& pick : subsets_of_size(static_cast<int>(slots.size()), fill)) {
          auto ext = prefix;
          for (int i : pick) ext.push_back(slots[static_cast<std::size_t>(i)]);
          next.push_back(std::move(ext));
        }
      choices.swap(next);
    }
  }

  std::vector<Eigen::Index> digits(static_cast<std::size_t>(regs));
  long count = 0;
  for (const auto& chosen : choices) {
    std::vector<int> nonzero_slots = a_slots;
    nonzero_slots.insert(nonzero_slots.end(), chosen.begin(), chosen.end());
    std::sort(nonzero_slots.begin(), nonzero_slots.end());
    std::vector<int> arr = T.symbols;
    do {
      std::fill(digits.begin(), digits.end(), 0);
      for (std::size_t i = 0; i < nonzero_slots.size(); ++i)
        digits[static_cast<std::size_t>(nonzero_slots[i])] = arr[i];
      out(layout.flat(digits)) = 1.0;
      ++count;
    } while (std::next_permutation(arr.begin(), arr.end()));
  }
  if (count == 0) throw std::invalid_argument("zero_state: empty support");
  out /= std::sqrt(static_cast<double>(count));
  return out;
}

}  // namespace

Vec zero_state(const TypeMultiset& T, int N, const std::vector<bool>& zero_allowed) {
  return build_zero_state(T, N, zero_allowed, nullptr);
}

Vec zero_state_blocks(const TypeMultiset& T, int N, const std::vector<ZeroBlock>& blocks) {
  std::vector<bool> zero_allowed;
  std::vector<std::pair<std::vector<int>, int>> per_block;
  int expected = 0;
  for (const auto& blk : blocks) {
    for (int i = 0; i < blk.a; ++i) zero_allowed.push_back(false);
    std::vector<int> slots;
    for (int i = 0; i < blk.b; ++i) {
      slots.push_back(static_cast<int>(zero_allowed.size()));
      zero_allowed.push_back(true);
    }
    per_block.emplace_back(std::move(slots), blk.fill);
    expected += blk.a + blk.fill;
  }
  if (expected != T.size())
    throw std::invalid_argument("zero_state_blocks: |T| != sum(a_i + fill_i)");
  return build_zero_state(T, N, zero_allowed, &per_block);
}

double verify_zerosplit(const TypeMultiset& T, int a1, int a2, int b1, int b2, int N) {
  if (!T.collision_free()) throw std::invalid_argument("verify_zerosplit: T must be collision free");
  std::vector<bool> joint_mask;
  for (int i = 0; i < a1; ++i) joint_mask.push_back(false);
  for (int i = 0; i < b1; ++i) joint_mask.push_back(true);
  for (int i = 0; i < a2; ++i) joint_mask.push_back(false);
  for (int i = 0; i < b2; ++i) joint_mask.push_back(true);
  Vec lhs = zero_state(T, N, joint_mask);

  std::vector<bool> mask1, mask2;
  for (int i = 0; i < a1; ++i) mask1.push_back(false);
  for (int i = 0; i < b1; ++i) mask1.push_back(true);
  for (int i = 0; i < a2; ++i) mask2.push_back(false);
  for (int i = 0; i < b2; ++i) mask2.push_back(true);

  const int size = T.size();
  Vec rhs = Vec::Zero(lhs.size());
  for (int i = a1; i <= std::min(a1 + b1, size - a2); ++i) {
    if (size - i > a2 + b2) continue;
    const double alpha = binom(b1, i - a1) * binom(b2, size - i - a2) /
                         (binom(b1 + b2, size - a1 - a2) * binom(size, i));
    if (alpha <= 0.0) continue;
    for (const auto& X : sub_multisets(T, i)) {
      const TypeMultiset rest = T.minus(X);
      rhs += std::sqrt(alpha) * kron(zero_state(X, N, mask1), zero_state(rest, N, mask2));
    }
  }
  return (lhs - rhs).norm();
}

double verify_zerosplit2(const TypeMultiset& T, int a1, int a2, int b1, int b2, int b1f,
                         int b2f, int N) {
  if (!T.collision_free())
    throw std::invalid_argument("verify_zerosplit2: T must be collision free");
  if (T.size() != a1 + a2 + b1f + b2f)
    throw std::invalid_argument("verify_zerosplit2: |T| != a1+a2+b1f+b2f");
  Vec lhs = zero_state_blocks(T, N, {{a1, b1, b1f}, {a2, b2, b2f}});

  std::vector<bool> mask1, mask2;
  for (int i = 0; i < a1; ++i) mask1.push_back(false);
  for (int i = 0; i < b1; ++i) mask1.push_back(true);
  for (int i = 0; i < a2; ++i) mask2.push_back(false);
  for (int i = 0; i < b2; ++i) mask2.push_back(true);

  Vec rhs = Vec::Zero(lhs.size());
  const double w = 1.0 / std::sqrt(binom(T.size(), a1 + b1f));
  for (const auto& X : sub_multisets(T, a1 + b1f)) {
    const TypeMultiset rest = T.minus(X);
    rhs += w * kron(zero_state(X, N, mask1), zero_state(rest, N, mask2));
  }
  return (lhs - rhs).norm();
}

double haar_type_identity_check(int n_qubits, int copies) {
  const int N = 1 << n_qubits;
  Mat lhs = sym_projector(N, copies) / binom(N + copies - 1, copies);
  const auto types = all_types(N, copies);
  Mat rhs = Mat::Zero(lhs.rows(), lhs.cols());
  for (const auto& T : types) {
    Vec tv = type_vector(T, N);
    rhs.noalias() += (tv * tv.adjoint()) / static_cast<double>(types.size());
  }
  return 0.5 * trace_norm_hermitian(lhs - rhs);
}

CollisionConditioning collision_conditioning(int n_qubits, int copies) {
  const int N = 1 << n_qubits;
  const auto types = all_types(N, copies);
  const auto cf = collision_free_types(N, copies);
  CollisionConditioning out;
  out.non_cf_probability = 1.0 - static_cast<double>(cf.size()) / types.size();
  if (cf.empty()) {
    out.distance = 1.0;
    return out;
  }
  StateEnsemble full, conditioned;
  for (const auto& T : types) full.append(1.0 / types.size(), type_vector(T, N));
  for (const auto& T : cf) conditioned.append(1.0 / cf.size(), type_vector(T, N));
  out.distance = trace_distance(full, conditioned);
  return out;
}

}  // namespace qlab
