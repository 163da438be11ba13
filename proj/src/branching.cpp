#include "branchlab/branching.hpp"

#include <cmath>
#include <stdexcept>

namespace branchlab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::vector<Factor> chain_factors(int n) {
  Factor system{"system", {}};
  Factor detector{"detector", {kBlank}};
  Factor observer{"observer", {kBlank}};
  Factor write{"write", {kBlank}};
  for (int k = 1; k <= n; ++k) {
    system.alphabet.push_back(BranchState::system_symbol(k));
    detector.alphabet.push_back(BranchState::detector_symbol(k));
    observer.alphabet.push_back(BranchState::observer_symbol(k));
    write.alphabet.push_back(BranchState::write_symbol(k));
  }
  write.alphabet.push_back(kNonClassical);
  return {system, detector, observer, write};
}

// Permutation unitary on the product alphabet of two factors: swaps the
// listed index pairs, identity elsewhere. Indices are (first*size2 + second).
LinearOperator swap_unitary(std::size_t dim,
                            const std::vector<std::pair<std::size_t, std::size_t>>& swaps) {
  std::vector<std::size_t> perm(dim);
  for (std::size_t i = 0; i < dim; ++i) perm[i] = i;
  for (const auto& [a, b] : swaps) std::swap(perm[a], perm[b]);
  std::vector<Amplitude> e(dim * dim, Amplitude{0.0, 0.0});
  for (std::size_t col = 0; col < dim; ++col) e[perm[col] * dim + col] = Amplitude{1.0, 0.0};
  return LinearOperator(dim, std::move(e), OperatorKind::Unitary);
}

}  // namespace

BranchState premeasurement(const std::vector<Amplitude>& a, int n) {
  require(n >= 1, "premeasurement: n must be >= 1");
  require(static_cast<int>(a.size()) == n, "premeasurement: need n amplitudes");
  double s = 0.0;
  for (const auto& x : a) s += std::norm(x);
  require(std::abs(s - 1.0) <= 1e-10, "premeasurement: input not normalized");

  auto factors = chain_factors(n);
  std::size_t dim = 1;
  for (const auto& f : factors) dim *= f.alphabet.size();
  StateVector sv(factors, std::vector<Amplitude>(dim, Amplitude{0.0, 0.0}));
  std::vector<Amplitude> amps(dim, Amplitude{0.0, 0.0});
  for (int k = 1; k <= n; ++k) {
    // element (k, blank, blank, blank)
    const std::vector<std::size_t> idx{static_cast<std::size_t>(k - 1), 0, 0, 0};
    amps[sv.encode(idx)] = a[k - 1];
  }
  return BranchState(sv.with_amps(std::move(amps)), n, Stage::Premeasured);
}

BranchState couple_detectors(const BranchState& s) {
  require(s.stage() == Stage::Premeasured, "couple_detectors: detectors not blank");
  const int n = s.outcome_count();
  const std::size_t d2 = static_cast<std::size_t>(n + 1);
  std::vector<std::pair<std::size_t, std::size_t>> swaps;
  for (int k = 1; k <= n; ++k) {
    const std::size_t sys = static_cast<std::size_t>(k - 1);
    swaps.emplace_back(sys * d2 + 0, sys * d2 + static_cast<std::size_t>(k));
  }
  auto u = swap_unitary(static_cast<std::size_t>(n) * d2, swaps);
  return BranchState(apply_on_factors(u, s.state(), {"system", "detector"}), n,
                     Stage::DetectorsCoupled);
}

BranchState couple_observer(const BranchState& s) {
  require(s.stage() == Stage::DetectorsCoupled,
          "couple_observer: detectors must be coupled and observer blank");
  const int n = s.outcome_count();
  const std::size_t o2 = static_cast<std::size_t>(n + 1);
  std::vector<std::pair<std::size_t, std::size_t>> swaps;
  for (int k = 1; k <= n; ++k) {
    const std::size_t det = static_cast<std::size_t>(k);  // "D<k>:yes" index in alphabet
    swaps.emplace_back(det * o2 + 0, det * o2 + static_cast<std::size_t>(k));
  }
  auto u = swap_unitary(static_cast<std::size_t>(n + 1) * o2, swaps);
  return BranchState(apply_on_factors(u, s.state(), {"detector", "observer"}), n,
                     Stage::ObserverCoupled);
}

BranchState couple_writer(const BranchState& s) {
  require(s.stage() == Stage::ObserverCoupled,
          "couple_writer: observer must be coupled and write register blank");
  const int n = s.outcome_count();
  const std::size_t w2 = static_cast<std::size_t>(n + 2);
  std::vector<std::pair<std::size_t, std::size_t>> swaps;
  for (int j = 1; j <= n; ++j) {
    const std::size_t obs = static_cast<std::size_t>(j);
    swaps.emplace_back(obs * w2 + 0, obs * w2 + static_cast<std::size_t>(j));
  }
  auto u = swap_unitary(static_cast<std::size_t>(n + 1) * w2, swaps);
  return BranchState(apply_on_factors(u, s.state(), {"observer", "write"}), n,
                     Stage::WriterCoupled);
}

BranchState BranchState::with_state(StateVector s) const {
  BranchState out(*this);
  out.state_ = std::move(s);
  return out;
}

Amplitude BranchState::branch_amplitude(int k) const {
  require(k >= 1 && k <= n_, "branch index out of range");
  const std::size_t sys = static_cast<std::size_t>(k - 1);
  const std::size_t rec = static_cast<std::size_t>(k);
  std::vector<std::size_t> idx{sys, 0, 0, 0};
  if (stage_ >= Stage::DetectorsCoupled) idx[1] = rec;
  if (stage_ >= Stage::ObserverCoupled) idx[2] = rec;
  if (stage_ >= Stage::WriterCoupled) idx[3] = rec;
  return state_.amp(state_.encode(idx));
}

StateVector BranchState::branch_vector(int k) const {
  require(k >= 1 && k <= n_, "branch index out of range");
  std::vector<std::string> syms{system_symbol(k), kBlank, kBlank, kBlank};
  if (stage_ >= Stage::DetectorsCoupled) syms[1] = detector_symbol(k);
  if (stage_ >= Stage::ObserverCoupled) syms[2] = observer_symbol(k);
  if (stage_ >= Stage::WriterCoupled) syms[3] = write_symbol(k);
  return StateVector::basis_state(state_.factors(), syms);
}

double nonclassical_weight(const BranchState& s) {
  require(s.stage() == Stage::WriterCoupled, "nonclassical_weight: writer not coupled");
  return subspace_weight(s.state(), [](const BasisPoint& p) {
    const std::string& w = p.symbol("write");
    return w == kNonClassical || w != p.symbol("observer");
  });
}

std::pair<BranchState, BranchState> mixed_observer_states(const BranchState& s) {
  require(s.outcome_count() == 2, "mixed_observer_states: n must be 2");
  require(s.stage() == Stage::ObserverCoupled, "mixed_observer_states: observer not coupled");
  const double r = 1.0 / std::sqrt(2.0);
  const StateVector b1 = s.branch_vector(1);
  const StateVector b2 = s.branch_vector(2);
  std::vector<Amplitude> pa(b1.dim()), pb(b1.dim());
  for (std::size_t i = 0; i < b1.dim(); ++i) {
    pa[i] = r * (b1.amp(i) + b2.amp(i));
    pb[i] = r * (b1.amp(i) - b2.amp(i));
  }
  return {s.with_state(b1.with_amps(std::move(pa))),
          s.with_state(b1.with_amps(std::move(pb)))};
}

std::vector<std::string> color_signal(const BranchState& s) {
  require(s.outcome_count() <= 2, "color_signal: defined for n <= 2");
  require(s.stage() >= Stage::DetectorsCoupled, "color_signal: detectors not coupled");
  const StateVector& sv = s.state();
  for (std::size_t e = 0; e < sv.dim(); ++e) {
    if (std::norm(sv.amp(e)) <= 1e-24) continue;
    const std::string& d = sv.symbol(e, "detector");
    // a single basis element carrying more than one yes record would signal
    // "green"; the composite record alphabet has exactly one yes per token
    std::size_t yes_count = 0;
    for (std::size_t pos = d.find(":yes"); pos != std::string::npos;
         pos = d.find(":yes", pos + 1))
      ++yes_count;
    require(yes_count <= 1, "color_signal: non-classical double-yes element found");
  }
  std::vector<std::string> colors;
  colors.push_back("blue");
  if (s.outcome_count() == 2) colors.push_back("yellow");
  return colors;
}

BlockHamiltonian::BlockHamiltonian(LinearOperator op, int n, bool verified_block)
    : op_(std::move(op)), n_(n), block_(verified_block) {
  require(op_.kind() == OperatorKind::Hermitian, "BlockHamiltonian: operator must be hermitian");
  const std::size_t dim = static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1);
  require(op_.dim() == dim, "BlockHamiltonian: wrong dimension");
  if (verified_block) {
    // entries between different detector records must vanish
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) {
        const std::size_t dr = r % static_cast<std::size_t>(n + 1);
        const std::size_t dc = c % static_cast<std::size_t>(n + 1);
        if (dr != dc)
          require(std::abs(op_.at(r, c)) <= 1e-12,
                  "BlockHamiltonian: operator does not commute with detector projectors");
      }
  }
}

BlockHamiltonian BlockHamiltonian::random(int n, Rng& rng) {
  const std::size_t nd = static_cast<std::size_t>(n + 1);
  const std::size_t dim = static_cast<std::size_t>(n) * nd;
  std::vector<Amplitude> e(dim * dim, Amplitude{0.0, 0.0});
  // one random hermitian system-block per detector record
  for (std::size_t d = 0; d < nd; ++d) {
    auto block = random_hermitian(static_cast<std::size_t>(n), rng);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i)
      for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j)
        e[(i * nd + d) * dim + (j * nd + d)] = block.at(i, j);
  }
  return BlockHamiltonian(LinearOperator(dim, std::move(e), OperatorKind::Hermitian), n, true);
}

BlockHamiltonian BlockHamiltonian::non_block_coupling(int n, int i, int j, double strength) {
  const std::size_t nd = static_cast<std::size_t>(n + 1);
  const std::size_t dim = static_cast<std::size_t>(n) * nd;
  std::vector<Amplitude> e(dim * dim, Amplitude{0.0, 0.0});
  const std::size_t a = static_cast<std::size_t>(i - 1) * nd + static_cast<std::size_t>(i);
  const std::size_t b = static_cast<std::size_t>(j - 1) * nd + static_cast<std::size_t>(j);
  e[a * dim + b] = Amplitude{strength, 0.0};
  e[b * dim + a] = Amplitude{strength, 0.0};
  return BlockHamiltonian(LinearOperator(dim, std::move(e), OperatorKind::Hermitian), n, false);
}

InterbranchReport interbranch_elements(const BlockHamiltonian& h, const BranchState& s) {
  require(s.stage() >= Stage::DetectorsCoupled, "interbranch_elements: detectors not coupled");
  const int n = s.outcome_count();
  InterbranchReport rep;
  rep.flagged_non_block = !h.is_block();
  rep.matrix.assign(n, std::vector<Amplitude>(n));
  std::vector<StateVector> hbk;
  std::vector<StateVector> bk;
  for (int k = 1; k <= n; ++k) {
    bk.push_back(s.branch_vector(k));
    hbk.push_back(apply_on_factors(h.op(), bk.back(), BlockHamiltonian::factor_names()));
  }
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      rep.matrix[j][k] = inner_product(bk[j], hbk[k]);
      if (j != k) rep.max_offdiagonal = std::max(rep.max_offdiagonal, std::abs(rep.matrix[j][k]));
    }
  return rep;
}

std::vector<double> evolve_and_check_weights(const BlockHamiltonian& h,
                                             const BranchState& s, double t) {
  require(s.stage() >= Stage::DetectorsCoupled, "evolve_and_check_weights: detectors not coupled");
  const int n = s.outcome_count();
  StateVector evolved =
      matrix_exponential_apply(h.op(), t, s.state(), BlockHamiltonian::factor_names());
  std::vector<double> weights;
  for (int k = 1; k <= n; ++k) {
    const std::string rec = BranchState::detector_symbol(k);
    weights.push_back(subspace_weight(
        evolved, [&rec](const BasisPoint& p) { return p.symbol("detector") == rec; }));
  }
  return weights;
}

nlohmann::json state_to_json(const StateVector& sv) {
  nlohmann::json j;
  j["factors"] = nlohmann::json::array();
  for (const auto& f : sv.factors())
    j["factors"].push_back({{"name", f.name}, {"alphabet", f.alphabet}});
  nlohmann::json amps = nlohmann::json::array();
  for (const auto& a : sv.amps()) amps.push_back({a.real(), a.imag()});
  j["amps"] = std::move(amps);
  return j;
}

StateVector state_from_json(const nlohmann::json& j) {
  std::vector<Factor> factors;
  for (const auto& f : j.at("factors"))
    factors.push_back({f.at("name").get<std::string>(),
                       f.at("alphabet").get<std::vector<std::string>>()});
  std::vector<Amplitude> amps;
  for (const auto& a : j.at("amps"))
    amps.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
  return StateVector(std::move(factors), std::move(amps));
}

}  // namespace branchlab
