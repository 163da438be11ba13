#pragma once

#include <string>
#include <vector>

#include "branchlab/tensorcore.hpp"

#include "json.hpp"

namespace branchlab {

/// Measurement-chain stage of a BranchState.
enum class Stage { Premeasured, DetectorsCoupled, ObserverCoupled, WriterCoupled };

inline constexpr const char* kBlank = "blank";
inline constexpr const char* kNonClassical = "inf";

/// State of the system/detector/observer/write chain for an n-outcome
/// measurement. Detector records are composite tokens "D<k>:yes" (one yes,
/// rest no). The write register holds "blank", an outcome symbol, or "inf"
/// reserved for non-classical results.
class BranchState {
 public:
  int outcome_count() const { return n_; }
  Stage stage() const { return stage_; }
  const StateVector& state() const { return state_; }

  /// Amplitude carried by branch k (1-based) at the current stage.
  Amplitude branch_amplitude(int k) const;
  /// Unit vector along branch k at the current stage.
  StateVector branch_vector(int k) const;

  static std::string system_symbol(int k) { return std::to_string(k); }
  static std::string detector_symbol(int k) { return "D" + std::to_string(k) + ":yes"; }
  static std::string observer_symbol(int k) { return std::to_string(k); }
  static std::string write_symbol(int k) { return std::to_string(k); }

  BranchState with_state(StateVector s) const;

 private:
  friend BranchState premeasurement(const std::vector<Amplitude>& a, int n);
  friend BranchState couple_detectors(const BranchState& s);
  friend BranchState couple_observer(const BranchState& s);
  friend BranchState couple_writer(const BranchState& s);
  BranchState(StateVector s, int n, Stage stage)
      : state_(std::move(s)), n_(n), stage_(stage) {}
  StateVector state_;
  int n_;
  Stage stage_;
};

/// System factor carries amplitudes a(k); detector/observer/write registers
/// blank. Input must already be normalized (no silent renormalization).
BranchState premeasurement(const std::vector<Amplitude>& a, int n);

/// Correlate each system component k with detector record "D<k>:yes".
BranchState couple_detectors(const BranchState& s);

/// Set the observer record to k on branch k.
BranchState couple_observer(const BranchState& s);

/// Write register gets k on branch k; linear extension of
/// |Obs k, blank> -> |Obs k, writes k>, keyed on the observer record only.
BranchState couple_writer(const BranchState& s);

/// Weight on {write = inf} union {write != observer record}.
double nonclassical_weight(const BranchState& s);

/// The +/- 1/sqrt(2) combinations of the two branches (n = 2 only).
std::pair<BranchState, BranchState> mixed_observer_states(const BranchState& s);

/// Per-branch color tokens for the two-path light argument; asserts that no
/// single basis element carries more than one detector-yes record.
std::vector<std::string> color_signal(const BranchState& s);

/// Hermitian operator on the system (x) detector pair space, block-diagonal
/// across detector records (Sum_k H_k (x) Pi_k form).
class BlockHamiltonian {
 public:
  /// Wrap an operator; `block` records whether it honors the block structure
  /// (non-block operators are allowed for negative tests and flagged).
  BlockHamiltonian(LinearOperator op, int n, bool verified_block);

  /// Random block Hamiltonian for an n-outcome chain.
  static BlockHamiltonian random(int n, Rng& rng);
  /// Deliberately non-block coupling between branches i and j.
  static BlockHamiltonian non_block_coupling(int n, int i, int j, double strength);

  const LinearOperator& op() const { return op_; }
  int outcome_count() const { return n_; }
  bool is_block() const { return block_; }

  /// Factor names the operator acts on (system, detector).
  static std::vector<std::string> factor_names() { return {"system", "detector"}; }

 private:
  LinearOperator op_;
  int n_;
  bool block_;
};

struct InterbranchReport {
  std::vector<std::vector<Amplitude>> matrix;  // M(j,k) = <branch j|H|branch k>
  double max_offdiagonal = 0.0;
  bool flagged_non_block = false;
};

/// Matrix elements of h between the normalized branches of s.
InterbranchReport interbranch_elements(const BlockHamiltonian& h, const BranchState& s);

/// Per-branch squared weights after evolving by exp(-i h t).
std::vector<double> evolve_and_check_weights(const BlockHamiltonian& h,
                                             const BranchState& s, double t);

/// JSON (de)serialization of raw states; double round-trip is exact.
nlohmann::json state_to_json(const StateVector& sv);
StateVector state_from_json(const nlohmann::json& j);

}  // namespace branchlab
