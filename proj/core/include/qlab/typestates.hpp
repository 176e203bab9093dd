#pragma once

#include "qlab/hilbert.hpp"

namespace qlab {

/// Multiset over the symbol alphabet [1..N], stored sorted.
struct TypeMultiset {
  std::vector<int> symbols;

  TypeMultiset() = default;
  explicit TypeMultiset(std::vector<int> syms);

  int size() const { return static_cast<int>(symbols.size()); }
  bool collision_free() const;
  TypeMultiset minus(const TypeMultiset& sub) const;  // multiset difference

  bool operator==(const TypeMultiset& o) const { return symbols == o.symbols; }
};

std::vector<TypeMultiset> all_types(int N, int t);
std::vector<TypeMultiset> collision_free_types(int N, int t);

/// Sub-multisets of T of the given size (each exactly once).
std::vector<TypeMultiset> sub_multisets(const TypeMultiset& T, int size);

/// Normalized uniform superposition over all arrangements of T, on |T|
/// registers of dimension N (symbol x occupies index x-1).
Vec type_vector(const TypeMultiset& T, int N);

/// Uniform superposition over strings on registers of dimension N+1 whose
/// nonzero symbols form exactly T, with index 0 (the flag) confined to the
/// registers where zero_allowed is true. Throws when |T| cannot fit.
Vec zero_state(const TypeMultiset& T, int N, const std::vector<bool>& zero_allowed);

struct ZeroBlock {
  int a = 0;     // leading no-zero registers
  int b = 0;     // zero-allowed registers
  int fill = 0;  // required nonzero count among the b registers
};

/// Two-or-more-block variant with per-block nonzero counts pinned. Register
/// order is block 0's a then b registers, block 1's, and so on. Requires
/// |T| = sum_i (a_i + fill_i).
Vec zero_state_blocks(const TypeMultiset& T, int N, const std::vector<ZeroBlock>& blocks);

/// Residual norm of the split of a jointly zero-padded state into weighted
/// per-block pieces, over registers (A1, B1, A2, B2). Exact zero up to
/// roundoff for collision-free T.
double verify_zerosplit(const TypeMultiset& T, int a1, int a2, int b1, int b2, int N);

/// Residual norm of the per-block-count variant with fills (b1f, b2f).
double verify_zerosplit2(const TypeMultiset& T, int a1, int a2, int b1, int b2, int b1f,
                         int b2f, int N);

/// Trace distance between the k-copy Haar moment (symmetric projector over
/// its dimension count) and the uniform mixture of type vectors.
double haar_type_identity_check(int n_qubits, int copies);

struct CollisionConditioning {
  double distance = 0.0;       // 1/2 || full - conditioned ||_1
  double non_cf_probability = 0.0;
};

/// Distance between the uniform type mixture and its collision-free
/// conditioned version. When no collision-free type exists the distance is
/// reported as 1.
CollisionConditioning collision_conditioning(int n_qubits, int copies);

}  // namespace qlab
