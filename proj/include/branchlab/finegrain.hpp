#pragma once

#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "branchlab/tensorcore.hpp"

#include "json.hpp"

namespace branchlab {

using Rational = boost::rational<long long>;

/// Fine-graining plan: rational weights m_k / M with a common denominator M,
/// one equal-amplitude ancilla alphabet of size m_k per outcome.
struct FineGrainPlan {
  long long common_denominator = 0;      // M
  std::vector<long long> numerators;     // m_k, sum = M
};

/// One populated equal-amplitude branch of a fine-grained state.
struct FineBranch {
  int outcome = 0;            // 1-based coarse outcome k
  int ancilla = 0;            // 1-based slot within outcome k's ancilla
  long long alphabet_size = 0;  // size of that ancilla's alphabet (the "spin")
};

struct FineGrainedState {
  StateVector state;
  FineGrainPlan plan;
  std::vector<FineBranch> branches;      // in basis order
  Rational branch_amp2;                  // exact squared amplitude, 1/M
};

/// Compose equal-amplitude ancillas so that every branch carries squared
/// amplitude exactly 1/M. Weights must be positive rationals summing to 1.
FineGrainedState fine_grain(const std::vector<Rational>& weights);

/// Probability of each coarse outcome by branch counting: m_k / M exactly.
std::vector<Rational> branch_count_probability(const FineGrainPlan& plan);

enum class SwapVerdict { Admissible, Dissimilar };

/// Admissible iff the two branches' ancilla alphabets have the same size
/// (same system-ancilla shape). Branch indices are 1-based.
SwapVerdict swap_admissibility(const FineGrainedState& state, int i, int j);

/// Two-outcome variant with both ancillas drawn from one shared alphabet;
/// the smaller one is padded with zero-amplitude slots so every populated
/// branch pair is swap-admissible.
FineGrainedState uniformize_workaround(const std::vector<Rational>& weights);

nlohmann::json plan_to_json(const FineGrainPlan& plan);
nlohmann::json fine_grained_to_json(const FineGrainedState& s);

}  // namespace branchlab
