#pragma once

#include <complex>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "branchlab/rng.hpp"

namespace branchlab {

using Amplitude = std::complex<double>;

/// One tensor factor: a named register with a finite symbol alphabet.
struct Factor {
  std::string name;
  std::vector<std::string> alphabet;
};

class StateVector;

/// View onto one basis element of a StateVector; predicates read record
/// symbols through it.
class BasisPoint {
 public:
  BasisPoint(const StateVector& sv, std::size_t element) : sv_(&sv), element_(element) {}
  const std::string& symbol(std::string_view factor_name) const;
  std::size_t element() const { return element_; }

 private:
  const StateVector* sv_;
  std::size_t element_;
};

using LabelPredicate = std::function<bool(const BasisPoint&)>;

/// Dense complex vector over the product basis of its factors.
/// Basis elements are ordered row-major, last factor varying fastest.
class StateVector {
 public:
  StateVector(std::vector<Factor> factors, std::vector<Amplitude> amps);

  /// Basis state with amplitude 1 on the named symbols (one per factor).
  static StateVector basis_state(std::vector<Factor> factors,
                                 const std::vector<std::string>& symbols);

  std::size_t dim() const { return amps_.size(); }
  const std::vector<Factor>& factors() const { return factors_; }
  const std::vector<Amplitude>& amps() const { return amps_; }
  const Amplitude& amp(std::size_t i) const { return amps_[i]; }

  std::size_t factor_position(std::string_view name) const;
  bool has_factor(std::string_view name) const;

  /// Symbol index of `element` in the factor at position `pos`.
  std::size_t symbol_index(std::size_t element, std::size_t pos) const;
  const std::string& symbol(std::size_t element, std::string_view factor_name) const;

  /// Basis element from per-factor symbol indices.
  std::size_t encode(const std::vector<std::size_t>& indices) const;

  double norm() const;
  StateVector normalized() const;

  StateVector with_amps(std::vector<Amplitude> amps) const;

 private:
  std::vector<Factor> factors_;
  std::vector<std::size_t> strides_;
  std::vector<Amplitude> amps_;
};

enum class OperatorKind { General, Hermitian, Unitary };

/// Dense complex matrix, row-major. The kind flag is validated on
/// construction: Unitary to 1e-10, Hermitian to 1e-12.
class LinearOperator {
 public:
  LinearOperator(std::size_t dim, std::vector<Amplitude> entries, OperatorKind kind);

  static LinearOperator identity(std::size_t dim);

  std::size_t dim() const { return dim_; }
  OperatorKind kind() const { return kind_; }
  const Amplitude& at(std::size_t row, std::size_t col) const {
    return entries_[row * dim_ + col];
  }
  const std::vector<Amplitude>& entries() const { return entries_; }

 private:
  std::size_t dim_;
  std::vector<Amplitude> entries_;
  OperatorKind kind_;
};

/// Haar-ish random unitary via Gram-Schmidt on a random complex matrix.
LinearOperator random_unitary(std::size_t dim, Rng& rng);
/// Random hermitian with entries O(1).
LinearOperator random_hermitian(std::size_t dim, Rng& rng);

StateVector tensor_product(const StateVector& u, const StateVector& v);

/// Conjugate-linear in u, linear in v. Requires identical factor structure.
Amplitude inner_product(const StateVector& u, const StateVector& v);

StateVector apply(const LinearOperator& opr, const StateVector& psi);

/// Apply an operator defined on the product alphabet of the named factors,
/// identity on all other factors. Operator dimension must equal the product
/// of the named factors' alphabet sizes; basis ordering follows the order of
/// `factor_names` (last fastest).
StateVector apply_on_factors(const LinearOperator& opr, const StateVector& psi,
                             const std::vector<std::string>& factor_names);

/// Unitary rotation of one tensor factor.
StateVector rotate_factor(const StateVector& psi, std::string_view factor_name,
                          const LinearOperator& u2);

/// Sum of |amp|^2 over basis elements matching the predicate.
double subspace_weight(const StateVector& psi, const LabelPredicate& predicate);

/// exp(-i h t)|psi> by scaled truncated series; h hermitian, dim <= 64.
StateVector matrix_exponential_apply(const LinearOperator& h, double t,
                                     const StateVector& psi);

/// Same, with h acting only on the named factors.
StateVector matrix_exponential_apply(const LinearOperator& h, double t,
                                     const StateVector& psi,
                                     const std::vector<std::string>& factor_names);

}  // namespace branchlab
