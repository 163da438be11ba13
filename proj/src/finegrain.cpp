#include "branchlab/finegrain.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace branchlab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

FineGrainPlan make_plan(const std::vector<Rational>& weights) {
  require(!weights.empty(), "fine_grain: empty weight list");
  Rational sum(0);
  long long m = 1;
  for (const auto& w : weights) {
    require(w > Rational(0), "fine_grain: weights must be positive");
    sum += w;
    m = std::lcm(m, w.denominator());
  }
  require(sum == Rational(1), "fine_grain: weights must sum to 1 exactly");
  FineGrainPlan plan;
  plan.common_denominator = m;
  for (const auto& w : weights)
    plan.numerators.push_back(w.numerator() * (m / w.denominator()));
  return plan;
}

}  // namespace

FineGrainedState fine_grain(const std::vector<Rational>& weights) {
  FineGrainPlan plan = make_plan(weights);
  const long long m_total = plan.common_denominator;
  const int n = static_cast<int>(plan.numerators.size());

  Factor system{"system", {}};
  Factor ancilla{"ancilla", {}};
  for (int k = 1; k <= n; ++k) system.alphabet.push_back(std::to_string(k));
  long long max_m = 0;
  for (long long mk : plan.numerators) max_m = std::max(max_m, mk);
  for (long long j = 1; j <= max_m; ++j) ancilla.alphabet.push_back(std::to_string(j));

  const std::size_t dim = static_cast<std::size_t>(n) * static_cast<std::size_t>(max_m);
  std::vector<Amplitude> amps(dim, Amplitude{0.0, 0.0});
  const double amp = std::sqrt(1.0 / static_cast<double>(m_total));
  FineGrainedState out{StateVector({system, ancilla}, amps), plan, {}, Rational(1, m_total)};
  std::vector<Amplitude> filled(dim, Amplitude{0.0, 0.0});
  for (int k = 0; k < n; ++k)
    for (long long j = 0; j < plan.numerators[static_cast<std::size_t>(k)]; ++j) {
      filled[static_cast<std::size_t>(k) * static_cast<std::size_t>(max_m) +
             static_cast<std::size_t>(j)] = Amplitude{amp, 0.0};
      out.branches.push_back(
          {k + 1, static_cast<int>(j) + 1, plan.numerators[static_cast<std::size_t>(k)]});
    }
  out.state = out.state.with_amps(std::move(filled));
  return out;
}

std::vector<Rational> branch_count_probability(const FineGrainPlan& plan) {
  require(plan.common_denominator > 0, "branch_count_probability: invalid plan");
  std::vector<Rational> probs;
  long long sum = 0;
  for (long long mk : plan.numerators) {
    require(mk >= 0, "branch_count_probability: negative numerator");
    sum += mk;
    probs.emplace_back(mk, plan.common_denominator);
  }
  require(sum == plan.common_denominator, "branch_count_probability: numerators must sum to M");
  return probs;
}

SwapVerdict swap_admissibility(const FineGrainedState& state, int i, int j) {
  require(i >= 1 && i <= static_cast<int>(state.branches.size()) && j >= 1 &&
              j <= static_cast<int>(state.branches.size()),
          "swap_admissibility: branch index out of range");
  const auto& bi = state.branches[static_cast<std::size_t>(i - 1)];
  const auto& bj = state.branches[static_cast<std::size_t>(j - 1)];
  return bi.alphabet_size == bj.alphabet_size ? SwapVerdict::Admissible : SwapVerdict::Dissimilar;
}

FineGrainedState uniformize_workaround(const std::vector<Rational>& weights) {
  require(weights.size() == 2, "uniformize_workaround: two outcomes required");
  FineGrainedState out = fine_grain(weights);
  // fine_grain already lays both ancillas out over one shared alphabet of the
  // larger size; mark every populated branch with that shared size so all
  // pairs compare as admissible, unused slots staying at amplitude zero
  long long shared = 0;
  for (const auto& b : out.branches) shared = std::max(shared, b.alphabet_size);
  for (auto& b : out.branches) b.alphabet_size = shared;
  return out;
}

nlohmann::json plan_to_json(const FineGrainPlan& plan) {
  return {{"common_denominator", plan.common_denominator}, {"numerators", plan.numerators}};
}

nlohmann::json fine_grained_to_json(const FineGrainedState& s) {
  nlohmann::json j;
  j["plan"] = plan_to_json(s.plan);
  j["branch_amp2"] = {{"num", s.branch_amp2.numerator()}, {"den", s.branch_amp2.denominator()}};
  j["branches"] = nlohmann::json::array();
  for (const auto& b : s.branches)
    j["branches"].push_back(
        {{"outcome", b.outcome}, {"ancilla", b.ancilla}, {"alphabet_size", b.alphabet_size}});
  return j;
}

}  // namespace branchlab
