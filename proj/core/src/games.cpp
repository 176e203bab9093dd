#include "qlab/games.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "qlab/combinatorics.hpp"

namespace qlab {

// ---------------------------------------------------------------------------
// Advantage estimates
// ---------------------------------------------------------------------------

double AdvantageEstimate::stderr_value() const {
  if (trials <= 0) return 0.0;
  const double v1 = p_real * (1.0 - p_real) / trials;
  const double v2 = p_ideal * (1.0 - p_ideal) / trials;
  return std::sqrt(v1 + v2);
}

WilsonInterval wilson_interval(double p_hat, long n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p_hat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// ---------------------------------------------------------------------------
// Workspace
// ---------------------------------------------------------------------------

std::size_t Workspace::add_register(const Vec& state) {
  state_ = (dims_.empty()) ? state : kron(state_, state);
  dims_.push_back(state.size());
  return dims_.size() - 1;
}

void Workspace::apply(std::size_t reg, const Mat& op) {
  state_ = apply_to_register(state_, layout(), reg, op);
}

std::vector<double> Workspace::outcome_probabilities(std::span<const Mat> projectors,
                                                     std::span<const std::size_t> regs) const {
  std::vector<double> probs;
  probs.reserve(projectors.size());
  const RegisterLayout lay = layout();
  for (const auto& p : projectors)
    probs.push_back(apply_subset_op(state_, lay, regs, p).squaredNorm());
  return probs;
}

int Workspace::measure(std::span<const Mat> projectors, std::span<const std::size_t> regs,
                       RngStream& rng) {
  const RegisterLayout lay = layout();
  std::vector<Vec> branches;
  std::vector<double> probs;
  for (const auto& p : projectors) {
    branches.push_back(apply_subset_op(state_, lay, regs, p));
    probs.push_back(branches.back().squaredNorm());
  }
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-8)
    throw std::invalid_argument("Workspace::measure: incomplete projector family");
  double u = rng.uniform() * total;
  std::size_t pick = std::max_element(probs.begin(), probs.end()) - probs.begin();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (u < probs[i]) {
      pick = i;
      break;
    }
    u -= probs[i];
  }
  // A roundoff fallthrough lands on the most likely branch, never a null one.
  state_ = branches[pick] / std::sqrt(probs[pick]);
  return static_cast<int>(pick);
}

int Workspace::measure_swap_test(std::size_t reg_a, std::size_t reg_b, RngStream& rng) {
  const Eigen::Index d = dims_.at(reg_a);
  if (dims_.at(reg_b) != d)
    throw std::invalid_argument("measure_swap_test: unequal register dims");
  const Mat sym = sym_projector(d, 2);
  const Mat rest = Mat::Identity(d * d, d * d) - sym;
  const Mat fam[2] = {rest, sym};
  const std::size_t regs[2] = {reg_a, reg_b};
  return measure(std::span<const Mat>(fam, 2), std::span<const std::size_t>(regs, 2), rng);
}

int Workspace::measure_counting(std::span<const std::size_t> regs, RngStream& rng) {
  const RegisterLayout lay = layout();
  const int t = static_cast<int>(regs.size());
  std::vector<Vec> branches(t + 1, Vec::Zero(state_.size()));
  std::vector<Eigen::Index> digits(lay.size());
  for (Eigen::Index i = 0; i < state_.size(); ++i) {
    if (state_(i) == Cx(0.0, 0.0)) continue;
    lay.unflat(i, digits);
    int c = 0;
    for (auto r : regs) c += digits[r] != 0 ? 1 : 0;
    branches[c](i) = state_(i);
  }
  std::vector<double> probs(t + 1);
  for (int c = 0; c <= t; ++c) probs[c] = branches[c].squaredNorm();
  double u = rng.uniform() * std::accumulate(probs.begin(), probs.end(), 0.0);
  int pick = static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
  for (int c = 0; c <= t; ++c) {
    if (u < probs[c]) {
      pick = c;
      break;
    }
    u -= probs[c];
  }
  state_ = branches[pick] / std::sqrt(probs[pick]);
  return pick;
}

Mat Workspace::reduced(std::span<const std::size_t> regs) const {
  return reduced_density(state_, layout(), regs);
}

// ---------------------------------------------------------------------------
// TrialView
// ---------------------------------------------------------------------------

double TrialView::swap_accept(std::size_t reg_a, std::size_t reg_b) const {
  const std::size_t regs[2] = {reg_a, reg_b};
  Mat rho = reduced_density(joint, layout, std::span<const std::size_t>(regs, 2));
  const Eigen::Index d = layout.dim(reg_a);
  Cx tr = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) tr += rho(i * d + j, j * d + i);
  return 0.5 * (1.0 + tr.real());
}

double TrialView::project_accept(std::size_t reg, const Vec& target) const {
  const std::size_t regs[1] = {reg};
  Mat rho = reduced_density(joint, layout, std::span<const std::size_t>(regs, 1));
  return std::real((target.adjoint() * rho * target)(0, 0));
}

Mat TrialView::reduced(std::span<const std::size_t> regs) const {
  return reduced_density(joint, layout, regs);
}

// ---------------------------------------------------------------------------
// indiff_advantage
// ---------------------------------------------------------------------------

AdvantageEstimate indiff_advantage(const WorldSampler& real_world,
                                   const WorldSampler& ideal_world,
                                   const Distinguisher& dist, const WorldBudgets& budgets,
                                   long trials, RngStream& rng) {
  if (dist.primary_queries > budgets.primary_max ||
      dist.secondary_queries > budgets.secondary_max)
    throw BudgetExceeded("distinguisher exceeds declared query budgets");
  if (trials <= 0) throw std::invalid_argument("indiff_advantage: trials must be positive");

  long real_hits = 0, ideal_hits = 0;
  for (long t = 0; t < trials; ++t) {
    TrialView rv = real_world(dist.primary_queries, dist.secondary_queries, rng);
    double pr = std::clamp(dist.accept_probability(rv), 0.0, 1.0);
    real_hits += rng.bernoulli(pr) ? 1 : 0;
    TrialView iv = ideal_world(dist.primary_queries, dist.secondary_queries, rng);
    double pi = std::clamp(dist.accept_probability(iv), 0.0, 1.0);
    ideal_hits += rng.bernoulli(pi) ? 1 : 0;
  }
  return AdvantageEstimate{static_cast<double>(real_hits) / trials,
                           static_cast<double>(ideal_hits) / trials, trials};
}

WorldSampler chrsm_construction_world(const StateDistribution& dist, int retry_budget) {
  return [dist, retry_budget](int primary, int secondary, RngStream& rng) {
    const Vec phi = embed(dist.sample(rng));
    const Eigen::Index d = phi.size();
    const Vec minus = minus_state(phi);
    const Vec flag = flag_vector(d);

    TrialView view;
    Vec joint = Vec::Ones(1);
    for (int i = 0; i < primary; ++i) {
      joint = kron(joint, minus);
      view.primary_regs.push_back(static_cast<std::size_t>(i));
    }
    for (int j = 0; j < secondary; ++j) {
      bool success = false;
      for (int a = 0; a < retry_budget && !success; ++a) success = rng.bernoulli(0.5);
      joint = kron(joint, success ? phi : flag);
      view.secondary_regs.push_back(static_cast<std::size_t>(primary + j));
      view.secondary_failed.push_back(!success);
    }
    view.joint = std::move(joint);
    view.layout = RegisterLayout(
        std::vector<Eigen::Index>(static_cast<std::size_t>(primary + secondary), d));
    return view;
  };
}

WorldSampler chrs_simulator_world(const StateDistribution& dist, int sim_budget) {
  return [dist, sim_budget](int primary, int secondary, RngStream& rng) {
    if (primary > sim_budget)
      throw BudgetExceeded("simulator world: primary queries exceed the simulator budget");
    const Vec phi = embed(dist.sample(rng));
    const Eigen::Index d = phi.size();
    const int c = sample_binomial(sim_budget, rng).count;

    TrialView view;
    Vec joint = rep_state(sim_budget, c, phi);
    for (int i = 0; i < primary; ++i) view.primary_regs.push_back(static_cast<std::size_t>(i));
    for (int j = 0; j < secondary; ++j) {
      joint = kron(joint, phi);
      view.secondary_regs.push_back(static_cast<std::size_t>(sim_budget + j));
      view.secondary_failed.push_back(false);
    }
    view.joint = std::move(joint);
    view.layout = RegisterLayout(
        std::vector<Eigen::Index>(static_cast<std::size_t>(sim_budget + secondary), d));
    return view;
  };
}

std::vector<Distinguisher> standard_indiff_suite(int t1, int t2) {
  std::vector<Distinguisher> out;

  Distinguisher failure_probe;
  failure_probe.name = "failure-probe";
  failure_probe.primary_queries = 0;
  failure_probe.secondary_queries = t2;
  failure_probe.accept_probability = [](const TrialView& v) {
    for (bool f : v.secondary_failed)
      if (f) return 1.0;
    return 0.0;
  };
  out.push_back(std::move(failure_probe));

  Distinguisher cross_swap;
  cross_swap.name = "cross-swap-test";
  cross_swap.primary_queries = 1;
  cross_swap.secondary_queries = 1;
  cross_swap.accept_probability = [](const TrialView& v) {
    if (v.secondary_failed.at(0)) return 0.0;
    return v.swap_accept(v.primary_regs.at(0), v.secondary_regs.at(0));
  };
  out.push_back(std::move(cross_swap));

  Distinguisher counting_probe;
  counting_probe.name = "counting-probe";
  counting_probe.primary_queries = t1;
  counting_probe.secondary_queries = 0;
  counting_probe.accept_probability = [](const TrialView& v) {
    // Probability that every released register is in the non-flag sector.
    std::vector<Eigen::Index> digits(v.layout.size());
    double p = 0.0;
    for (Eigen::Index i = 0; i < v.joint.size(); ++i) {
      if (v.joint(i) == Cx(0.0, 0.0)) continue;
      v.layout.unflat(i, digits);
      bool all_filled = true;
      for (auto r : v.primary_regs)
        if (digits[r] == 0) all_filled = false;
      if (all_filled) p += std::norm(v.joint(i));
    }
    return p;
  };
  out.push_back(std::move(counting_probe));

  return out;
}

Distinguisher reference_projection_distinguisher(Vec reference) {
  Distinguisher d;
  d.name = "reference-projection";
  d.primary_queries = 1;
  d.secondary_queries = 0;
  d.accept_probability = [ref = std::move(reference)](const TrialView& v) {
    return v.project_accept(v.primary_regs.at(0), ref);
  };
  return d;
}

// ---------------------------------------------------------------------------
// compose_adversary
// ---------------------------------------------------------------------------

ModelAlgorithm compose_adversary(const EmitAlgorithm& adversary, const EmitSimulator& sim) {
  ModelAlgorithm out;
  out.name = adversary.name + "@" + sim.name;
  out.oracle_budget = adversary.emit_budget * sim.queries_per_emit;
  out.run = [adversary, sim](OracleModel& model, RngStream& rng) {
    int emits = 0;
    auto emit = [&model, &emits, &adversary, &sim]() -> Vec {
      if (++emits > adversary.emit_budget)
        throw BudgetExceeded("composed adversary: emit budget exceeded");
      return sim.emit(model);
    };
    return adversary.run(emit, rng);
  };
  return out;
}

// ---------------------------------------------------------------------------
// LOCC channel and runner
// ---------------------------------------------------------------------------

void LoccChannel::send(int sender, int receiver, std::vector<std::int64_t> payload) {
  messages_.push_back(LoccMessage{round_, sender, receiver, std::move(payload)});
}

void LoccChannel::send_quantum(int, int) {
  throw LoccViolation("quantum registers cannot cross parties; only classical payloads");
}

std::vector<LoccMessage> LoccChannel::visible_to(int party) const {
  std::vector<LoccMessage> out;
  for (const auto& m : messages_)
    if (m.receiver == -1 || m.receiver == party || m.sender == party) out.push_back(m);
  return out;
}

LoccRunResult locc_run(const std::vector<LoccParty>& parties,
                       std::vector<Workspace>& local_memories,
                       std::vector<OracleModel*> local_oracles, int rounds, RngStream& rng) {
  if (parties.empty()) throw std::invalid_argument("locc_run: no parties");
  if (local_memories.size() != parties.size())
    throw std::invalid_argument("locc_run: one workspace per party required");
  if (local_oracles.size() != parties.size())
    local_oracles.resize(parties.size(), nullptr);

  LoccChannel channel;
  std::vector<std::optional<std::int64_t>> outputs(parties.size());
  std::vector<RngStream> party_rngs;
  for (std::size_t i = 0; i < parties.size(); ++i) party_rngs.push_back(rng.fork(i + 1));

  for (int r = 1; r <= rounds; ++r) {
    channel.begin_round(r);
    for (std::size_t i = 0; i < parties.size(); ++i) {
      LoccPartyContext ctx;
      ctx.party = static_cast<int>(i);
      ctx.round = r;
      ctx.workspace = &local_memories[i];
      ctx.oracle = local_oracles[i];
      ctx.channel = &channel;
      ctx.rng = &party_rngs[i];
      ctx.output = outputs[i];
      parties[i](ctx);
      outputs[i] = ctx.output;
    }
  }

  LoccRunResult result;
  result.party_outputs = outputs;
  if (!outputs[0].has_value()) throw std::runtime_error("locc_run: party 0 produced no output");
  result.output = *outputs[0];
  result.transcript.messages = channel.all();
  for (auto* o : local_oracles)
    result.transcript.local_query_counts.push_back(o != nullptr ? o->query_count() : 0);
  return result;
}

// ---------------------------------------------------------------------------
// PPT bound
// ---------------------------------------------------------------------------

double ppt_bound(const DensityOperator& rho, const DensityOperator& sigma,
                 const RegisterLayout& layout, std::span<const std::size_t> second_party) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("ppt_bound: dimension mismatch");
  Mat diff = partial_transpose(rho.matrix(), layout, second_party) -
             partial_transpose(sigma.matrix(), layout, second_party);
  return 0.5 * trace_norm_hermitian(diff);
}

double KeyLemmaParams::bound() const {
  return std::numbers::e * std::pow(static_cast<double>(total()), 5) / std::sqrt(N);
}

// ---------------------------------------------------------------------------
// Hybrid states over blocks
// ---------------------------------------------------------------------------

namespace {

struct GroupSpec {
  std::vector<int> b_regs;  // register indices of the group's zero-allowed slots
  int fill = 0;
};

// One pure component: symbols of T assigned in order, first to the no-zero
// slots, then spread over each group's slots by the signed subset
// superposition. Anything built this way is normalized.
Vec type_component(int N, int total_regs, const std::vector<int>& a_slots,
                   const std::vector<GroupSpec>& groups, const TypeMultiset& T) {
  RegisterLayout layout(std::vector<Eigen::Index>(static_cast<std::size_t>(total_regs), N + 1));
  Vec out = Vec::Zero(layout.total_dim());

  int expected = static_cast<int>(a_slots.size());
  for (const auto& g : groups) expected += g.fill;
  if (expected != T.size())
    throw std::invalid_argument("type_component: |T| != slots + fills");

  double amp = 1.0 / std::sqrt(arrangement_count(T.symbols));
  int sign_power = 0;
  for (const auto& g : groups) {
    amp /= std::sqrt(binom(static_cast<int>(g.b_regs.size()), g.fill));
    sign_power += g.fill;
  }
  if (sign_power % 2 == 1) amp = -amp;

  // Per-group subset choices.
  std::vector<std::vector<std::vector<int>>> group_subsets;
  for (const auto& g : groups)
    group_subsets.push_back(subsets_of_size(static_cast<int>(g.b_regs.size()), g.fill));

  std::vector<int> arr = T.symbols;
  std::vector<Eigen::Index> digits(static_cast<std::size_t>(total_regs));
  std::sort(arr.begin(), arr.end());
  do {
    // Iterate the Cartesian product of group subset choices.
    std::vector<std::size_t> pick(groups.size(), 0);
    while (true) {
      std::fill(digits.begin(), digits.end(), 0);
      std::size_t next_symbol = 0;
      for (int slot : a_slots) digits[static_cast<std::size_t>(slot)] = arr[next_symbol++];
      for (std::size_t g = 0; g < groups.size(); ++g)
        for (int local : group_subsets[g][pick[g]])
          digits[static_cast<std::size_t>(groups[g].b_regs[static_cast<std::size_t>(local)])] =
              arr[next_symbol++];
      out(layout.flat(digits)) = amp;

      std::size_t g = 0;
      for (; g < groups.size(); ++g) {
        if (++pick[g] < group_subsets[g].size()) break;
        pick[g] = 0;
      }
      if (g == groups.size()) break;
    }
  } while (std::next_permutation(arr.begin(), arr.end()));
  return out;
}

}  // namespace

StateEnsemble hybrid_state(int N, const std::vector<HybridBlock>& blocks,
                           int independent_blocks, bool collision_free_only) {
  const int ell = static_cast<int>(blocks.size());
  if (independent_blocks < 0 || independent_blocks > ell)
    throw std::invalid_argument("hybrid_state: bad independent block count");
  {
    double dim = 1.0;
    for (const auto& b : blocks) dim *= std::pow(double(N) + 1.0, b.a + b.b);
    if (dim > double(1 << 24)) throw std::invalid_argument("hybrid_state: dimension overflow");
  }

  int total_regs = 0, total_a = 0;
  std::vector<int> a_slots;
  std::vector<GroupSpec> groups(static_cast<std::size_t>(independent_blocks) + 1);
  // Groups 0..independent_blocks-1 are per-block; the last group is shared.
  for (int blk = 0; blk < ell; ++blk) {
    for (int i = 0; i < blocks[static_cast<std::size_t>(blk)].a; ++i) a_slots.push_back(total_regs++);
    const int g = blk < independent_blocks ? blk : independent_blocks;
    for (int i = 0; i < blocks[static_cast<std::size_t>(blk)].b; ++i)
      groups[static_cast<std::size_t>(g)].b_regs.push_back(total_regs++);
    total_a += blocks[static_cast<std::size_t>(blk)].a;
  }
  if (groups.back().b_regs.empty()) groups.pop_back();

  StateEnsemble out;
  // Iterate fill counts per group with binomial weights.
  std::vector<int> fills(groups.size(), 0);
  while (true) {
    double weight = 1.0;
    int total_fill = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      weight *= binomial_pmf(static_cast<int>(groups[g].b_regs.size()), fills[g]);
      total_fill += fills[g];
    }
    const int type_size = total_a + total_fill;
    auto types = collision_free_only ? collision_free_types(N, type_size)
                                     : all_types(N, type_size);
    if (!types.empty()) {
      std::vector<GroupSpec> gs = groups;
      for (std::size_t g = 0; g < groups.size(); ++g) gs[g].fill = fills[g];
      for (const auto& T : types)
        out.append(weight / static_cast<double>(types.size()),
                   type_component(N, total_regs, a_slots, gs, T));
    }

    std::size_t g = 0;
    for (; g < groups.size(); ++g) {
      if (++fills[g] <= static_cast<int>(groups[g].b_regs.size())) break;
      fills[g] = 0;
    }
    if (g == groups.size()) break;
  }
  return out;
}

namespace {

StatePair make_state_pair(const KeyLemmaParams& p, bool collision_free_only) {
  std::vector<HybridBlock> blocks{{p.a1, p.b1}, {p.a2, p.b2}};
  StatePair pair;
  pair.rho = hybrid_state(p.N, blocks, 0, collision_free_only);
  pair.sigma = hybrid_state(p.N, blocks, 2, collision_free_only);
  const int regs = p.total();
  pair.layout = RegisterLayout(std::vector<Eigen::Index>(static_cast<std::size_t>(regs), p.N + 1));
  for (int r = p.a1 + p.b1; r < regs; ++r) pair.second_party.push_back(static_cast<std::size_t>(r));
  pair.first_dim = 1;
  for (int r = 0; r < p.a1 + p.b1; ++r) pair.first_dim *= (p.N + 1);
  return pair;
}

}  // namespace

StatePair key_lemma_states(const KeyLemmaParams& p) { return make_state_pair(p, true); }

StatePair mainthm_states(const KeyLemmaParams& p) { return make_state_pair(p, false); }

// ---------------------------------------------------------------------------
// PPT trace norm of mixtures
// ---------------------------------------------------------------------------

namespace {

bool ensemble_is_real(const StateEnsemble& e) {
  for (const auto& c : e.components)
    if (c.state.imag().cwiseAbs().maxCoeff() > 0.0) return false;
  return true;
}

struct SparseVec {
  std::vector<Eigen::Index> idx;
  std::vector<double> val;
};

SparseVec sparsify(const Vec& v) {
  SparseVec s;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i).real() != 0.0) {
      s.idx.push_back(i);
      s.val.push_back(v(i).real());
    }
  return s;
}

double sparse_dot(const SparseVec& a, const SparseVec& b) {
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.idx.size() && j < b.idx.size()) {
    if (a.idx[i] == b.idx[j]) acc += a.val[i++] * b.val[j++];
    else if (a.idx[i] < b.idx[j]) ++i;
    else ++j;
  }
  return acc;
}

// Orthonormal zero-padded type vectors on one side of the cut.
std::vector<Vec> side_basis(int N, const std::vector<bool>& zero_allowed) {
  int num_a = 0, num_b = 0;
  for (bool z : zero_allowed) (z ? num_b : num_a)++;
  std::vector<Vec> basis;
  for (int s = num_a; s <= num_a + num_b; ++s)
    for (const auto& X : all_types(N, s)) basis.push_back(zero_state(X, N, zero_allowed));
  return basis;
}

double ppt_dense(const StatePair& pair) {
  const Eigen::Index dim = pair.layout.total_dim();
  const Eigen::Index dA = pair.first_dim;
  const Eigen::Index dB = dim / dA;
  RegisterLayout cut({dA, dB});
  const std::size_t second[1] = {1};

  Mat diff = pair.rho.to_density() - pair.sigma.to_density();
  Mat t = partial_transpose(diff, cut, std::span<const std::size_t>(second, 1));
  return trace_norm_hermitian(t);
}

PptNormResult ppt_projected(const StatePair& pair, int N,
                            const std::vector<bool>& mask_first,
                            const std::vector<bool>& mask_second) {
  const Eigen::Index dim = pair.layout.total_dim();
  const Eigen::Index dA = pair.first_dim;
  const Eigen::Index dB = dim / dA;

  const auto basis_a = side_basis(N, mask_first);
  const auto basis_b = side_basis(N, mask_second);
  const Eigen::Index P = static_cast<Eigen::Index>(basis_a.size());
  const Eigen::Index Q = static_cast<Eigen::Index>(basis_b.size());

  RMat x(dA, P), y(dB, Q);
  for (Eigen::Index a = 0; a < P; ++a) x.col(a) = basis_a[static_cast<std::size_t>(a)].real();
  for (Eigen::Index b = 0; b < Q; ++b) y.col(b) = basis_b[static_cast<std::size_t>(b)].real();

  // Components with signs: +w for rho, -w for sigma.
  struct Comp {
    double sign_weight;
    const Vec* v;
  };
  std::vector<Comp> comps;
  for (const auto& c : pair.rho.components) comps.push_back({c.weight, &c.state});
  for (const auto& c : pair.sigma.components) comps.push_back({-c.weight, &c.state});
  const std::size_t r = comps.size();

  // G_k = X^T V_k Y with V_k the (dA x dB) reshape of component k. Stack the
  // shuffled Gram sum M'[(a,b'),(a',b)] = sum_k s_k g_k g_k^T.
  RMat g_plus(P * Q, static_cast<Eigen::Index>(r)), g_minus(P * Q, static_cast<Eigen::Index>(r));
  Eigen::Index n_plus = 0, n_minus = 0;
  double frob_full = 0.0;

  std::vector<SparseVec> sparse(r);
  for (std::size_t k = 0; k < r; ++k) sparse[k] = sparsify(*comps[k].v);
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t l = 0; l < r; ++l) {
      const double ip = sparse_dot(sparse[k], sparse[l]);
      frob_full += comps[k].sign_weight * comps[l].sign_weight * ip * ip;
    }

  for (std::size_t k = 0; k < r; ++k) {
    Eigen::Map<const RMat> vk_map(nullptr, 0, 0);
    RMat vk(dA, dB);
    {
      const Vec& v = *comps[k].v;
      for (Eigen::Index i = 0; i < dA; ++i)
        for (Eigen::Index j = 0; j < dB; ++j) vk(i, j) = v(i * dB + j).real();
    }
    RMat gk = x.transpose() * (vk * y);
    Eigen::Map<RVec> flat(gk.data(), P * Q);
    const double w = std::sqrt(std::abs(comps[k].sign_weight));
    if (comps[k].sign_weight >= 0) g_plus.col(n_plus++) = w * flat;
    else g_minus.col(n_minus++) = w * flat;
  }
  g_plus.conservativeResize(P * Q, n_plus);
  g_minus.conservativeResize(P * Q, n_minus);

  RMat m_shuffled = g_plus * g_plus.transpose() - g_minus * g_minus.transpose();

  // Careful with the Eigen::Map column order: gk is column-major, so
  // flat[(b * P) + a] = G(a, b). Undo the shuffle into M[(a,b),(a',b')] =
  // M'[(a,b'),(a',b)].
  auto mindex = [P](Eigen::Index a, Eigen::Index b) { return b * P + a; };
  RMat m(P * Q, P * Q);
  for (Eigen::Index a = 0; a < P; ++a)
    for (Eigen::Index b = 0; b < Q; ++b)
      for (Eigen::Index a2 = 0; a2 < P; ++a2)
        for (Eigen::Index b2 = 0; b2 < Q; ++b2)
          m(mindex(a, b), mindex(a2, b2)) = m_shuffled(mindex(a, b2), mindex(a2, b));

  PptNormResult out;
  const double frob_proj = m.squaredNorm();
  out.frobenius_gap = std::abs(frob_full - frob_proj);
  out.certified = out.frobenius_gap <= 1e-8 * std::max(1.0, std::abs(frob_full));
  out.value = eigvals_symmetric_inplace(m).cwiseAbs().sum();
  return out;
}

std::pair<std::vector<bool>, std::vector<bool>> cut_masks(const StatePair& pair) {
  // Recover the zero-allowed pattern from support: a register is zero-allowed
  // iff some component has flag support there. Robust and shape-agnostic.
  const std::size_t regs = pair.layout.size();
  std::vector<bool> allowed(regs, false);
  std::vector<Eigen::Index> digits(regs);
  auto scan = [&](const StateEnsemble& e) {
    for (const auto& c : e.components)
      for (Eigen::Index i = 0; i < c.state.size(); ++i) {
        if (c.state(i) == Cx(0.0, 0.0)) continue;
        pair.layout.unflat(i, digits);
        for (std::size_t rr = 0; rr < regs; ++rr)
          if (digits[rr] == 0) allowed[rr] = true;
      }
  };
  scan(pair.rho);
  scan(pair.sigma);

  Eigen::Index acc = 1;
  std::size_t split = 0;
  while (acc < pair.first_dim) acc *= pair.layout.dim(split++);
  if (acc != pair.first_dim)
    throw std::invalid_argument("ppt: first_dim is not a register boundary");
  std::vector<bool> first(allowed.begin(), allowed.begin() + static_cast<long>(split));
  std::vector<bool> second(allowed.begin() + static_cast<long>(split), allowed.end());
  return {first, second};
}

}  // namespace

PptNormResult ppt_trace_norm_mixtures(const StatePair& pair, PptMethod method) {
  const Eigen::Index dim = pair.layout.total_dim();
  if (method == PptMethod::Auto) method = dim <= 1600 ? PptMethod::Dense : PptMethod::Projected;
  if (method == PptMethod::Dense) {
    PptNormResult out;
    out.value = ppt_dense(pair);
    return out;
  }
  if (!ensemble_is_real(pair.rho) || !ensemble_is_real(pair.sigma))
    throw std::invalid_argument("ppt_trace_norm_mixtures: projected route needs real mixtures");
  const int N = static_cast<int>(pair.layout.dim(0)) - 1;
  auto [mf, ms] = cut_masks(pair);
  return ppt_projected(pair, N, mf, ms);
}

KeyLemmaVerification verify_key_lemma(const KeyLemmaParams& p, PptMethod method) {
  StatePair pair = key_lemma_states(p);
  PptNormResult r = ppt_trace_norm_mixtures(pair, method);
  KeyLemmaVerification v;
  v.lhs = r.value;
  v.bound = p.bound();
  v.precondition_met = p.precondition();
  v.certified = r.certified;
  return v;
}

// ---------------------------------------------------------------------------
// Counting measurement on mixtures
// ---------------------------------------------------------------------------

std::vector<CountingBranch> counting_measurement(const StateEnsemble& rho,
                                                 const RegisterLayout& layout,
                                                 std::span<const std::size_t> regs) {
  const int t = static_cast<int>(regs.size());
  std::vector<CountingBranch> out(static_cast<std::size_t>(t) + 1);
  for (int c = 0; c <= t; ++c) out[static_cast<std::size_t>(c)].count = c;

  std::vector<Eigen::Index> digits(layout.size());
  for (const auto& comp : rho.components) {
    std::vector<Vec> branch(static_cast<std::size_t>(t) + 1, Vec::Zero(comp.state.size()));
    for (Eigen::Index i = 0; i < comp.state.size(); ++i) {
      if (comp.state(i) == Cx(0.0, 0.0)) continue;
      layout.unflat(i, digits);
      int c = 0;
      for (auto r : regs) c += digits[r] != 0 ? 1 : 0;
      branch[static_cast<std::size_t>(c)](i) = comp.state(i);
    }
    for (int c = 0; c <= t; ++c) {
      const double p = branch[static_cast<std::size_t>(c)].squaredNorm();
      if (p <= 1e-300) continue;
      out[static_cast<std::size_t>(c)].probability += comp.weight * p;
      out[static_cast<std::size_t>(c)].post.append(
          comp.weight * p, branch[static_cast<std::size_t>(c)] / std::sqrt(p));
    }
  }
  for (auto& b : out)
    for (auto& c : b.post.components) c.weight /= std::max(b.probability, 1e-300);
  return out;
}

StateEnsemble counting_dephase(const StateEnsemble& rho, const RegisterLayout& layout,
                               std::span<const std::size_t> regs) {
  StateEnsemble out;
  for (const auto& branch : counting_measurement(rho, layout, regs))
    for (const auto& c : branch.post.components)
      out.append(branch.probability * c.weight, c.state);
  return out;
}

// ---------------------------------------------------------------------------
// Hybrid chain
// ---------------------------------------------------------------------------

HybridChainResult hybrid_chain_check(int N, const std::vector<HybridBlock>& blocks,
                                     PptMethod method) {
  const int ell = static_cast<int>(blocks.size());
  if (ell < 2) throw std::invalid_argument("hybrid_chain_check: need at least two blocks");

  std::vector<StateEnsemble> hybrids;
  for (int i = 0; i <= ell; ++i) hybrids.push_back(hybrid_state(N, blocks, i, false));

  int total_regs = 0;
  for (const auto& b : blocks) total_regs += b.a + b.b;
  RegisterLayout layout(std::vector<Eigen::Index>(static_cast<std::size_t>(total_regs), N + 1));

  KeyLemmaParams step_params;  // only the total matters for the bound
  step_params.N = N;

  HybridChainResult out;
  // Endpoint identities: the last two hybrids coincide, and splitting off the
  // final block is a no-op.
  out.endpoint_residual.push_back(trace_distance(hybrids[static_cast<std::size_t>(ell) - 1],
                                                 hybrids[static_cast<std::size_t>(ell)]));

  // Cut after block i+1, as a first-dim value.
  auto cut_dim = [&](int i) {
    int first_regs = 0;
    for (int b = 0; b <= i; ++b) first_regs += blocks[static_cast<std::size_t>(b)].a +
                                               blocks[static_cast<std::size_t>(b)].b;
    Eigen::Index dim = 1;
    for (int r = 0; r < first_regs; ++r) dim *= (N + 1);
    return dim;
  };
  auto ppt_at = [&](const StateEnsemble& x, const StateEnsemble& y, Eigen::Index first_dim) {
    StatePair pair;
    pair.rho = x;
    pair.sigma = y;
    pair.layout = layout;
    pair.first_dim = first_dim;
    return 0.5 * ppt_trace_norm_mixtures(pair, method).value;
  };

  // Steps i -> i+1 for i = 0..ell-2, each at the cut after block i+1; the
  // triangle comparison against the endpoints needs every step evaluated at
  // one fixed cut, so sum the chain per cut as well.
  for (int i = 0; i + 1 < ell; ++i) {
    out.step_ppt.push_back(ppt_at(hybrids[static_cast<std::size_t>(i)],
                                  hybrids[static_cast<std::size_t>(i) + 1], cut_dim(i)));

    KeyLemmaParams kp;
    kp.N = N;
    kp.a1 = 0;
    kp.b1 = 0;
    for (int b = 0; b <= i; ++b) {
      kp.a1 += blocks[static_cast<std::size_t>(b)].a;
      kp.b1 += blocks[static_cast<std::size_t>(b)].b;
    }
    kp.a2 = 0;
    kp.b2 = 0;
    for (int b = i + 1; b < ell; ++b) {
      kp.a2 += blocks[static_cast<std::size_t>(b)].a;
      kp.b2 += blocks[static_cast<std::size_t>(b)].b;
    }
    out.step_bound.push_back(kp.bound());
  }
  for (int g = 0; g + 1 < ell; ++g) {
    const Eigen::Index dim = cut_dim(g);
    out.direct_ppt.push_back(ppt_at(hybrids.front(), hybrids.back(), dim));
    double sum = 0.0;
    for (int i = 0; i + 1 <= ell; ++i)
      sum += ppt_at(hybrids[static_cast<std::size_t>(i)], hybrids[static_cast<std::size_t>(i) + 1],
                    dim);
    out.step_sum_at_cut.push_back(sum);
  }

  // Second endpoint identity: grouped assembly vs single-block assembly of
  // the fully shared state, after reordering registers to a-first.
  {
    HybridBlock merged{0, 0};
    for (const auto& b : blocks) {
      merged.a += b.a;
      merged.b += b.b;
    }
    StateEnsemble flat = hybrid_state(N, {merged}, 0, false);
    // Register order of `flat`: all a regs then all b regs. Build the
    // permutation taking the blocked order to that layout.
    std::vector<std::size_t> order;
    int reg = 0;
    std::vector<std::size_t> a_regs, b_regs;
    for (const auto& b : blocks) {
      for (int i = 0; i < b.a; ++i) a_regs.push_back(static_cast<std::size_t>(reg++));
      for (int i = 0; i < b.b; ++i) b_regs.push_back(static_cast<std::size_t>(reg++));
    }
    order = a_regs;
    order.insert(order.end(), b_regs.begin(), b_regs.end());
    StateEnsemble reordered;
    for (const auto& c : hybrids.front().components)
      reordered.append(c.weight, permute_registers(c.state, layout, order));
    out.endpoint_residual.push_back(trace_distance(reordered, flat));
  }

  return out;
}

// ---------------------------------------------------------------------------
// State distinguishing experiments
// ---------------------------------------------------------------------------

AdvantageEstimate state_advantage(const StateEnsemble& rho, const StateEnsemble& sigma,
                                  const StateDistinguisher& d, long trials, RngStream& rng) {
  long rho_hits = 0, sigma_hits = 0;
  for (long t = 0; t < trials; ++t) {
    const Vec& a = rho.sample(rng);
    rho_hits += rng.bernoulli(std::clamp(d.accept_probability(a), 0.0, 1.0)) ? 1 : 0;
    const Vec& b = sigma.sample(rng);
    sigma_hits += rng.bernoulli(std::clamp(d.accept_probability(b), 0.0, 1.0)) ? 1 : 0;
  }
  return AdvantageEstimate{static_cast<double>(rho_hits) / trials,
                           static_cast<double>(sigma_hits) / trials, trials};
}

double exact_state_advantage(const StateEnsemble& rho, const StateEnsemble& sigma,
                             const StateDistinguisher& d) {
  double pr = 0.0, ps = 0.0;
  for (const auto& c : rho.components) pr += c.weight * d.accept_probability(c.state);
  for (const auto& c : sigma.components) ps += c.weight * d.accept_probability(c.state);
  return std::abs(pr - ps);
}

namespace {

Mat random_unitary(Eigen::Index d, RngStream& rng) {
  Mat g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = Cx(rng.normal(), rng.normal());
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < d; ++i) {
    const Cx rd = r(i, i);
    q.col(i) *= rd / std::abs(rd);
  }
  return q;
}

// <v| A (x) B |v> via the (d1 x d2) reshape of v.
double pair_effect_accept(const Vec& v, const Mat& a, const Mat& b) {
  const Eigen::Index d1 = a.rows();
  const Eigen::Index d2 = b.rows();
  Eigen::Map<const Mat> vm(v.data(), d2, d1);  // column-major: vm(j, i) = v(i*d2+j)
  // <v|A(x)B|v> = Tr[V^dag A V B^T] with V(i,j) = v(i*d2+j) = vm(j,i)^T.
  Mat vmat = vm.transpose();
  return std::real((vmat.adjoint() * a * vmat * b.transpose()).trace());
}

}  // namespace

std::vector<StateDistinguisher> locc_state_suite(Eigen::Index reg_dim, std::uint64_t seed) {
  std::vector<StateDistinguisher> out;

  // Local flag/non-flag counting, accept when the outcomes agree.
  {
    StateDistinguisher d;
    d.name = "local-count-compare";
    d.locc = true;
    const Eigen::Index dd = reg_dim;
    d.accept_probability = [dd](const Vec& v) {
      Mat f = Mat::Zero(dd, dd);
      f(0, 0) = 1.0;
      Mat nf = Mat::Identity(dd, dd) - f;
      return pair_effect_accept(v, f, f) + pair_effect_accept(v, nf, nf);
    };
    out.push_back(std::move(d));
  }

  // Seeded random local bases, accept when the measured indices agree.
  for (int variant = 0; variant < 2; ++variant) {
    StateDistinguisher d;
    d.name = "random-local-basis-compare-" + std::to_string(variant);
    d.locc = true;
    RngStream r(seed, 17 + static_cast<std::uint64_t>(variant));
    Mat u1 = random_unitary(reg_dim, r);
    Mat u2 = random_unitary(reg_dim, r);
    d.accept_probability = [u1, u2, reg_dim](const Vec& v) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < reg_dim; ++k) {
        Mat e1 = u1.col(k) * u1.col(k).adjoint();
        Mat e2 = u2.col(k) * u2.col(k).adjoint();
        acc += pair_effect_accept(v, e1, e2);
      }
      return acc;
    };
    out.push_back(std::move(d));
  }

  return out;
}

StateDistinguisher random_one_way_locc(Eigen::Index dim1, Eigen::Index dim2,
                                       std::uint64_t seed) {
  StateDistinguisher d;
  d.name = "random-one-way-" + std::to_string(seed);
  d.locc = true;
  RngStream r(seed, 29);
  Mat u2 = random_unitary(dim2, r);
  Mat half = Mat::Zero(dim2, dim2);
  for (Eigen::Index i = 0; i < (dim2 + 1) / 2; ++i) half(i, i) = 1.0;
  Mat e0 = u2 * half * u2.adjoint();
  Mat e1 = Mat::Identity(dim2, dim2) - e0;

  Mat half1 = Mat::Zero(dim1, dim1);
  for (Eigen::Index i = 0; i < (dim1 + 1) / 2; ++i) half1(i, i) = 1.0;
  Mat a0 = random_unitary(dim1, r) * half1 * random_unitary(dim1, r).adjoint();
  // Outcome-dependent acceptance effects for party 1 (not projectors in
  // general; valid POVM effects after clamping to [0, I]).
  Mat u1a = random_unitary(dim1, r);
  Mat u1b = random_unitary(dim1, r);
  Mat acc0 = u1a * half1 * u1a.adjoint();
  Mat acc1 = u1b * half1 * u1b.adjoint();

  d.accept_probability = [acc0, acc1, e0, e1](const Vec& v) {
    return pair_effect_accept(v, acc0, e0) + pair_effect_accept(v, acc1, e1);
  };
  (void)a0;
  return d;
}

StateDistinguisher fused_swap_distinguisher(Eigen::Index reg_dim) {
  StateDistinguisher d;
  d.name = "fused-swap-test";
  d.locc = false;
  const Mat swap = swap_operator(reg_dim);
  d.accept_probability = [swap](const Vec& v) {
    return 0.5 * (1.0 + std::real((v.adjoint() * swap * v)(0, 0)));
  };
  return d;
}

StateDistinguisher helstrom_distinguisher(const StateEnsemble& rho,
                                          const StateEnsemble& sigma) {
  Mat diff = rho.to_density() - sigma.to_density();
  HermitianEig eig = eig_hermitian(diff);
  Mat pos = Mat::Zero(diff.rows(), diff.cols());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k)
    if (eig.values(k) > 0.0) pos.noalias() += eig.vectors.col(k) * eig.vectors.col(k).adjoint();
  StateDistinguisher d;
  d.name = "helstrom-optimal";
  d.locc = false;
  d.accept_probability = [pos](const Vec& v) {
    return std::real((v.adjoint() * pos * v)(0, 0));
  };
  return d;
}

// ---------------------------------------------------------------------------
// LOCC indifferentiability worlds
// ---------------------------------------------------------------------------

LoccWorldSampler locc_real_world(int n_qubits, int parties) {
  return [n_qubits, parties](const std::vector<int>& t1s, const std::vector<int>& t2s,
                             RngStream& rng) {
    if (static_cast<int>(t1s.size()) != parties || static_cast<int>(t2s.size()) != parties)
      throw std::invalid_argument("locc_real_world: per-party budgets required");
    const Vec phi = embed(sample_haar(n_qubits, rng).amplitudes());
    const Eigen::Index d = phi.size();

    LoccWorldTrial trial;
    for (int p = 0; p < parties; ++p) {
      Vec local = Vec::Ones(1);
      std::vector<std::size_t> prim, sec;
      std::vector<bool> failed;
      for (int i = 0; i < t1s[static_cast<std::size_t>(p)]; ++i) {
        local = kron(local, phi);
        prim.push_back(static_cast<std::size_t>(i));
        failed.push_back(false);
      }
      const int t2 = t2s[static_cast<std::size_t>(p)];
      if (t2 > 0) {
        const int c = sample_binomial(t2, rng).count;
        local = kron(local, rep_state(t2, c, phi));
        for (int j = 0; j < t2; ++j)
          sec.push_back(static_cast<std::size_t>(t1s[static_cast<std::size_t>(p)] + j));
      }
      const int regs = t1s[static_cast<std::size_t>(p)] + t2;
      trial.party_state.push_back(std::move(local));
      trial.party_layout.push_back(
          RegisterLayout(std::vector<Eigen::Index>(std::max(1, regs), regs == 0 ? 1 : d)));
      trial.primary_regs.push_back(std::move(prim));
      trial.secondary_regs.push_back(std::move(sec));
      trial.primary_failed.push_back(std::move(failed));
    }
    return trial;
  };
}

LoccWorldSampler locc_ideal_world(int n_qubits, int parties, int retry_budget) {
  return [n_qubits, parties, retry_budget](const std::vector<int>& t1s,
                                           const std::vector<int>& t2s, RngStream& rng) {
    if (static_cast<int>(t1s.size()) != parties || static_cast<int>(t2s.size()) != parties)
      throw std::invalid_argument("locc_ideal_world: per-party budgets required");
    const Vec phi = embed(sample_haar(n_qubits, rng).amplitudes());
    const Eigen::Index d = phi.size();
    const Vec minus = minus_state(phi);
    const Vec flag = flag_vector(d);

    LoccWorldTrial trial;
    for (int p = 0; p < parties; ++p) {
      Vec local = Vec::Ones(1);
      std::vector<std::size_t> prim, sec;
      std::vector<bool> failed;
      for (int i = 0; i < t1s[static_cast<std::size_t>(p)]; ++i) {
        bool success = false;
        for (int a = 0; a < retry_budget && !success; ++a) success = rng.bernoulli(0.5);
        local = kron(local, success ? phi : flag);
        prim.push_back(static_cast<std::size_t>(i));
        failed.push_back(!success);
      }
      for (int j = 0; j < t2s[static_cast<std::size_t>(p)]; ++j) {
        local = kron(local, minus);
        sec.push_back(static_cast<std::size_t>(t1s[static_cast<std::size_t>(p)] + j));
      }
      const int regs = t1s[static_cast<std::size_t>(p)] + t2s[static_cast<std::size_t>(p)];
      trial.party_state.push_back(std::move(local));
      trial.party_layout.push_back(
          RegisterLayout(std::vector<Eigen::Index>(std::max(1, regs), regs == 0 ? 1 : d)));
      trial.primary_regs.push_back(std::move(prim));
      trial.secondary_regs.push_back(std::move(sec));
      trial.primary_failed.push_back(std::move(failed));
    }
    return trial;
  };
}

AdvantageEstimate locc_indiff_advantage(const LoccWorldSampler& real_world,
                                        const LoccWorldSampler& ideal_world,
                                        const LoccDistinguisher& d, long trials,
                                        RngStream& rng) {
  long real_hits = 0, ideal_hits = 0;
  for (long t = 0; t < trials; ++t) {
    auto rv = real_world(d.primary_queries, d.secondary_queries, rng);
    real_hits += rng.bernoulli(std::clamp(d.accept_probability(rv), 0.0, 1.0)) ? 1 : 0;
    auto iv = ideal_world(d.primary_queries, d.secondary_queries, rng);
    ideal_hits += rng.bernoulli(std::clamp(d.accept_probability(iv), 0.0, 1.0)) ? 1 : 0;
  }
  return AdvantageEstimate{static_cast<double>(real_hits) / trials,
                           static_cast<double>(ideal_hits) / trials, trials};
}

double locc_indiff_envelope(int n_qubits, int parties, int t1_per_party, int t2_per_party,
                            int retry_budget) {
  const int N = 1 << n_qubits;
  KeyLemmaParams shape{t1_per_party, t1_per_party, t2_per_party, t2_per_party, N};
  StatePair pair = mainthm_states(shape);
  const double ppt = 0.5 * ppt_trace_norm_mixtures(pair, PptMethod::Auto).value;
  return ppt + parties * t1_per_party * std::pow(2.0, -retry_budget);
}

std::vector<LoccDistinguisher> locc_world_suite(int t2_per_party) {
  std::vector<LoccDistinguisher> out;

  // Local counting of one construction output, classical compare.
  {
    LoccDistinguisher d;
    d.name = "local-count-compare";
    d.locc = true;
    d.primary_queries = {0, 0};
    d.secondary_queries = {t2_per_party, t2_per_party};
    d.accept_probability = [](const LoccWorldTrial& t) {
      double flag_prob[2];
      for (std::size_t p = 0; p < 2; ++p) {
        const std::size_t reg = t.secondary_regs[p].at(0);
        Mat red = reduced_density(t.party_state[p], t.party_layout[p], std::span(&reg, 1));
        flag_prob[p] = std::real(red(0, 0));
      }
      return flag_prob[0] * flag_prob[1] + (1.0 - flag_prob[0]) * (1.0 - flag_prob[1]);
    };
    out.push_back(std::move(d));
  }

  // Local swap test of the extracted copy against a construction output,
  // classical compare; failed extractions reject locally.
  {
    LoccDistinguisher d;
    d.name = "local-swap-compare";
    d.locc = true;
    d.primary_queries = {1, 1};
    d.secondary_queries = {t2_per_party, t2_per_party};
    d.accept_probability = [](const LoccWorldTrial& t) {
      double p_acc[2];
      for (std::size_t p = 0; p < 2; ++p) {
        if (t.primary_failed[p].at(0)) {
          p_acc[p] = 0.0;
          continue;
        }
        const std::size_t regs[2] = {t.primary_regs[p].at(0), t.secondary_regs[p].at(0)};
        Mat red = reduced_density(t.party_state[p], t.party_layout[p], std::span(regs, 2));
        const Eigen::Index dd = t.party_layout[p].dim(regs[0]);
        Cx tr = 0.0;
        for (Eigen::Index i = 0; i < dd; ++i)
          for (Eigen::Index j = 0; j < dd; ++j) tr += red(i * dd + j, j * dd + i);
        p_acc[p] = 0.5 * (1.0 + tr.real());
      }
      return p_acc[0] * p_acc[1] + (1.0 - p_acc[0]) * (1.0 - p_acc[1]);
    };
    out.push_back(std::move(d));
  }
  return out;
}

LoccDistinguisher locc_fused_swap(Eigen::Index reg_dim) {
  LoccDistinguisher d;
  d.name = "fused-cross-swap";
  d.locc = false;
  d.primary_queries = {0, 0};
  d.secondary_queries = {1, 1};
  const Mat swap = swap_operator(reg_dim);
  d.accept_probability = [swap](const LoccWorldTrial& t) {
    Vec joint = kron(t.party_state[0], t.party_state[1]);
    return 0.5 * (1.0 + std::real((joint.adjoint() * swap * joint)(0, 0)));
  };
  return d;
}

LoccDistinguisher locc_fused_helstrom(int n_qubits) {
  KeyLemmaParams shape{0, 0, 1, 1, 1 << n_qubits};
  StatePair view = mainthm_states(shape);
  StateDistinguisher hel = helstrom_distinguisher(view.sigma, view.rho);
  LoccDistinguisher d;
  d.name = "fused-helstrom";
  d.locc = false;
  d.primary_queries = {0, 0};
  d.secondary_queries = {1, 1};
  d.accept_probability = [hel](const LoccWorldTrial& t) {
    return hel.accept_probability(kron(t.party_state[0], t.party_state[1]));
  };
  return d;
}

std::vector<LoccIndiffRow> locc_indiff_experiment(int n_qubits, int parties, int t2_per_party,
                                                  int retry_budget, long trials,
                                                  RngStream& rng) {
  if (parties != 2) throw std::invalid_argument("locc_indiff_experiment: two parties supported");
  LoccWorldSampler real = locc_real_world(n_qubits, parties);
  LoccWorldSampler ideal = locc_ideal_world(n_qubits, parties, retry_budget);

  std::vector<LoccIndiffRow> rows;
  auto run = [&](const LoccDistinguisher& d, double envelope) {
    LoccIndiffRow row;
    row.distinguisher = d.name;
    row.locc = d.locc;
    row.estimate = locc_indiff_advantage(real, ideal, d, trials, rng);
    row.envelope = envelope;
    row.within = d.locc
                     ? row.estimate.advantage() <= envelope + 4.0 * row.estimate.stderr_value()
                     : row.estimate.advantage() > envelope;
    rows.push_back(std::move(row));
  };

  for (const auto& d : locc_world_suite(t2_per_party)) {
    const int t1 = d.primary_queries.at(0);
    run(d, locc_indiff_envelope(n_qubits, parties, t1, t2_per_party, retry_budget));
  }
  const double fused_envelope = locc_indiff_envelope(n_qubits, parties, 0, 1, retry_budget);
  run(locc_fused_swap((1 << n_qubits) + 1), fused_envelope);
  run(locc_fused_helstrom(n_qubits), fused_envelope);
  return rows;
}

// ---------------------------------------------------------------------------
// Key exchange games
// ---------------------------------------------------------------------------

KeGameResult ke_game_run(const KeProtocol& protocol, KeGame game,
                         const StateDistribution& dist, const KeAdversary* adversary,
                         long trials, RngStream& rng) {
  if (game == KeGame::Security && adversary == nullptr)
    throw std::invalid_argument("ke_game_run: security game needs an adversary");

  long wins = 0;
  for (long t = 0; t < trials; ++t) {
    const Vec phi = embed(dist.sample(rng));
    OracleModel alice_oracle = OracleModel::with_hidden(OracleKind::ChrsMinus, phi);
    OracleModel bob_oracle = OracleModel::with_hidden(OracleKind::ChrsMinus, phi);

    std::vector<Workspace> memories(2);
    std::vector<LoccParty> parties{protocol.alice(), protocol.bob()};
    std::vector<OracleModel*> oracles{&alice_oracle, &bob_oracle};
    RngStream run_rng = rng.fork(1000 + static_cast<std::uint64_t>(t));
    LoccRunResult run = locc_run(parties, memories, oracles, protocol.rounds, run_rng);

    const std::int64_t b_alice = run.party_outputs.at(0).value_or(0);
    const std::int64_t b_bob = run.party_outputs.at(1).value_or(0);
    if (game == KeGame::Correctness) {
      wins += (b_alice != b_bob) ? 1 : 0;
    } else {
      RngStream adv_rng = rng.fork(2000 + static_cast<std::uint64_t>(t));
      wins += (adversary->guess(run.transcript, adv_rng) == b_alice) ? 1 : 0;
    }
  }
  KeGameResult result;
  result.win_rate = static_cast<double>(wins) / trials;
  result.trials = trials;
  result.guess_offset = game == KeGame::Security ? 0.5 : 0.0;
  return result;
}

}  // namespace qlab
