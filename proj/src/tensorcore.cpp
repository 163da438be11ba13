#include "branchlab/tensorcore.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace branchlab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool finite(const Amplitude& a) {
  return std::isfinite(a.real()) && std::isfinite(a.imag());
}

}  // namespace

const std::string& BasisPoint::symbol(std::string_view factor_name) const {
  return sv_->symbol(element_, factor_name);
}

StateVector::StateVector(std::vector<Factor> factors, std::vector<Amplitude> amps)
    : factors_(std::move(factors)), amps_(std::move(amps)) {
  std::size_t dim = 1;
  std::set<std::string> names;
  for (const auto& f : factors_) {
    require(!f.alphabet.empty(), "factor '" + f.name + "' has empty alphabet");
    require(names.insert(f.name).second, "duplicate factor name '" + f.name + "'");
    dim *= f.alphabet.size();
  }
  require(amps_.size() == dim, "amplitude count does not match basis dimension");
  for (const auto& a : amps_) require(finite(a), "non-finite amplitude");
  strides_.assign(factors_.size(), 1);
  for (std::size_t i = factors_.size(); i-- > 1;)
    strides_[i - 1] = strides_[i] * factors_[i].alphabet.size();
}

StateVector StateVector::basis_state(std::vector<Factor> factors,
                                     const std::vector<std::string>& symbols) {
  require(symbols.size() == factors.size(), "one symbol per factor required");
  std::size_t dim = 1;
  for (const auto& f : factors) dim *= f.alphabet.size();
  StateVector sv(std::move(factors), std::vector<Amplitude>(dim, Amplitude{0.0, 0.0}));
  std::vector<std::size_t> idx(sv.factors_.size());
  for (std::size_t i = 0; i < sv.factors_.size(); ++i) {
    const auto& alpha = sv.factors_[i].alphabet;
    auto it = std::find(alpha.begin(), alpha.end(), symbols[i]);
    require(it != alpha.end(), "symbol '" + symbols[i] + "' not in alphabet of factor '" +
                                   sv.factors_[i].name + "'");
    idx[i] = static_cast<std::size_t>(it - alpha.begin());
  }
  sv.amps_[sv.encode(idx)] = Amplitude{1.0, 0.0};
  return sv;
}

std::size_t StateVector::factor_position(std::string_view name) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].name == name) return i;
  throw std::invalid_argument("no factor named '" + std::string(name) + "'");
}

bool StateVector::has_factor(std::string_view name) const {
  for (const auto& f : factors_)
    if (f.name == name) return true;
  return false;
}

std::size_t StateVector::symbol_index(std::size_t element, std::size_t pos) const {
  return (element / strides_[pos]) % factors_[pos].alphabet.size();
}

const std::string& StateVector::symbol(std::size_t element,
                                       std::string_view factor_name) const {
  const std::size_t pos = factor_position(factor_name);
  return factors_[pos].alphabet[symbol_index(element, pos)];
}

std::size_t StateVector::encode(const std::vector<std::size_t>& indices) const {
  std::size_t e = 0;
  for (std::size_t i = 0; i < indices.size(); ++i) e += indices[i] * strides_[i];
  return e;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

StateVector StateVector::normalized() const {
  const double n = norm();
  require(n > 0.0, "cannot normalize the zero vector");
  std::vector<Amplitude> out(amps_);
  for (auto& a : out) a /= n;
  return StateVector(factors_, std::move(out));
}

StateVector StateVector::with_amps(std::vector<Amplitude> amps) const {
  return StateVector(factors_, std::move(amps));
}

LinearOperator::LinearOperator(std::size_t dim, std::vector<Amplitude> entries,
                               OperatorKind kind)
    : dim_(dim), entries_(std::move(entries)), kind_(kind) {
  require(entries_.size() == dim_ * dim_, "operator entry count != dim^2");
  for (const auto& a : entries_) require(finite(a), "non-finite operator entry");
  if (kind_ == OperatorKind::Hermitian) {
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) {
        const Amplitude d = entries_[i * dim_ + j] - std::conj(entries_[j * dim_ + i]);
        require(std::abs(d) <= 1e-12, "operator flagged hermitian is not (H != H^dagger)");
      }
  } else if (kind_ == OperatorKind::Unitary) {
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) {
        Amplitude s{0.0, 0.0};
        for (std::size_t k = 0; k < dim_; ++k)
          s += std::conj(entries_[k * dim_ + i]) * entries_[k * dim_ + j];
        const Amplitude expect = (i == j) ? Amplitude{1.0, 0.0} : Amplitude{0.0, 0.0};
        require(std::abs(s - expect) <= 1e-10, "operator flagged unitary is not (U^dagger U != I)");
      }
  }
}

LinearOperator LinearOperator::identity(std::size_t dim) {
  std::vector<Amplitude> e(dim * dim, Amplitude{0.0, 0.0});
  for (std::size_t i = 0; i < dim; ++i) e[i * dim + i] = Amplitude{1.0, 0.0};
  return LinearOperator(dim, std::move(e), OperatorKind::Unitary);
}

LinearOperator random_unitary(std::size_t dim, Rng& rng) {
  // Columns: random gaussian vectors, Gram-Schmidt orthonormalized.
  std::vector<std::vector<Amplitude>> cols(dim, std::vector<Amplitude>(dim));
  for (std::size_t c = 0; c < dim; ++c) {
    for (std::size_t r = 0; r < dim; ++r)
      cols[c][r] = Amplitude{rng.normal(), rng.normal()};
    for (std::size_t p = 0; p < c; ++p) {
      Amplitude proj{0.0, 0.0};
      for (std::size_t r = 0; r < dim; ++r) proj += std::conj(cols[p][r]) * cols[c][r];
      for (std::size_t r = 0; r < dim; ++r) cols[c][r] -= proj * cols[p][r];
    }
    double nrm = 0.0;
    for (std::size_t r = 0; r < dim; ++r) nrm += std::norm(cols[c][r]);
    nrm = std::sqrt(nrm);
    for (std::size_t r = 0; r < dim; ++r) cols[c][r] /= nrm;
  }
  std::vector<Amplitude> entries(dim * dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) entries[r * dim + c] = cols[c][r];
  return LinearOperator(dim, std::move(entries), OperatorKind::Unitary);
}

LinearOperator random_hermitian(std::size_t dim, Rng& rng) {
  std::vector<Amplitude> e(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    e[i * dim + i] = Amplitude{rng.normal(), 0.0};
    for (std::size_t j = i + 1; j < dim; ++j) {
      const Amplitude v{rng.normal(), rng.normal()};
      e[i * dim + j] = v;
      e[j * dim + i] = std::conj(v);
    }
  }
  return LinearOperator(dim, std::move(e), OperatorKind::Hermitian);
}

StateVector tensor_product(const StateVector& u, const StateVector& v) {
  for (const auto& fu : u.factors())
    for (const auto& fv : v.factors())
      require(fu.name != fv.name, "tensor_product: overlapping factor name '" + fu.name + "'");
  std::vector<Factor> factors = u.factors();
  factors.insert(factors.end(), v.factors().begin(), v.factors().end());
  std::vector<Amplitude> amps(u.dim() * v.dim());
  for (std::size_t i = 0; i < u.dim(); ++i)
    for (std::size_t j = 0; j < v.dim(); ++j)
      amps[i * v.dim() + j] = u.amp(i) * v.amp(j);
  return StateVector(std::move(factors), std::move(amps));
}

Amplitude inner_product(const StateVector& u, const StateVector& v) {
  require(u.dim() == v.dim(), "inner_product: dimension mismatch");
  const auto& fu = u.factors();
  const auto& fv = v.factors();
  require(fu.size() == fv.size(), "inner_product: basis mismatch");
  for (std::size_t i = 0; i < fu.size(); ++i)
    require(fu[i].name == fv[i].name && fu[i].alphabet == fv[i].alphabet,
            "inner_product: basis mismatch");
  Amplitude s{0.0, 0.0};
  for (std::size_t i = 0; i < u.dim(); ++i) s += std::conj(u.amp(i)) * v.amp(i);
  return s;
}

StateVector apply(const LinearOperator& opr, const StateVector& psi) {
  require(opr.dim() == psi.dim(), "apply: dimension mismatch");
  std::vector<Amplitude> out(psi.dim(), Amplitude{0.0, 0.0});
  for (std::size_t r = 0; r < psi.dim(); ++r) {
    Amplitude s{0.0, 0.0};
    for (std::size_t c = 0; c < psi.dim(); ++c) s += opr.at(r, c) * psi.amp(c);
    out[r] = s;
  }
  return psi.with_amps(std::move(out));
}

StateVector apply_on_factors(const LinearOperator& opr, const StateVector& psi,
                             const std::vector<std::string>& factor_names) {
  std::vector<std::size_t> pos;
  std::size_t sub_dim = 1;
  for (const auto& name : factor_names) {
    pos.push_back(psi.factor_position(name));
    sub_dim *= psi.factors()[pos.back()].alphabet.size();
  }
  require(opr.dim() == sub_dim, "apply_on_factors: operator dim != product of factor alphabets");

  const std::size_t nf = psi.factors().size();
  std::vector<Amplitude> out(psi.dim(), Amplitude{0.0, 0.0});
  std::vector<std::size_t> digits(nf);
  for (std::size_t e = 0; e < psi.dim(); ++e) {
    for (std::size_t f = 0; f < nf; ++f) digits[f] = psi.symbol_index(e, f);
    // row index within the operator's sub-basis
    std::size_t row = 0;
    for (std::size_t f : pos) row = row * psi.factors()[f].alphabet.size() + digits[f];
    Amplitude s{0.0, 0.0};
    std::vector<std::size_t> src = digits;
    for (std::size_t col = 0; col < sub_dim; ++col) {
      const Amplitude& m = opr.at(row, col);
      if (m == Amplitude{0.0, 0.0}) continue;
      std::size_t rem = col;
      for (std::size_t i = pos.size(); i-- > 0;) {
        const std::size_t sz = psi.factors()[pos[i]].alphabet.size();
        src[pos[i]] = rem % sz;
        rem /= sz;
      }
      s += m * psi.amp(psi.encode(src));
    }
    out[e] = s;
  }
  return psi.with_amps(std::move(out));
}

StateVector rotate_factor(const StateVector& psi, std::string_view factor_name,
                          const LinearOperator& u2) {
  require(u2.kind() == OperatorKind::Unitary, "rotate_factor: operator must be unitary");
  return apply_on_factors(u2, psi, {std::string(factor_name)});
}

double subspace_weight(const StateVector& psi, const LabelPredicate& predicate) {
  double s = 0.0;
  for (std::size_t e = 0; e < psi.dim(); ++e)
    if (predicate(BasisPoint(psi, e))) s += std::norm(psi.amp(e));
  return s;
}

namespace {

// exp(-i h t) psi via scaling + truncated Taylor series; hv is the action of h.
StateVector expi_series(const StateVector& psi, double t,
                        const std::function<StateVector(const StateVector&)>& hv,
                        double hscale) {
  // choose substeps so that |h * t / steps| is O(1)
  const double total = std::abs(t) * hscale;
  const std::size_t steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(total)));
  const Amplitude factor = Amplitude{0.0, -1.0} * (t / static_cast<double>(steps));
  StateVector cur = psi;
  for (std::size_t s = 0; s < steps; ++s) {
    StateVector acc = cur;
    StateVector term = cur;
    for (int k = 1; k < 64; ++k) {
      term = hv(term);
      std::vector<Amplitude> t_amps(term.amps());
      const Amplitude coeff = factor / static_cast<double>(k);
      for (auto& a : t_amps) a *= coeff;
      term = term.with_amps(std::move(t_amps));
      std::vector<Amplitude> acc_amps(acc.amps());
      for (std::size_t i = 0; i < acc_amps.size(); ++i) acc_amps[i] += term.amp(i);
      acc = acc.with_amps(std::move(acc_amps));
      if (term.norm() < 1e-16) break;
    }
    cur = acc;
  }
  return cur;
}

double operator_scale(const LinearOperator& h) {
  // crude norm bound: max row sum of magnitudes
  double m = 0.0;
  for (std::size_t r = 0; r < h.dim(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < h.dim(); ++c) s += std::abs(h.at(r, c));
    m = std::max(m, s);
  }
  return m;
}

}  // namespace

StateVector matrix_exponential_apply(const LinearOperator& h, double t,
                                     const StateVector& psi) {
  require(h.kind() == OperatorKind::Hermitian, "matrix_exponential_apply: h must be hermitian");
  require(h.dim() <= 64, "matrix_exponential_apply: dim > 64 unsupported");
  require(h.dim() == psi.dim(), "matrix_exponential_apply: dimension mismatch");
  return expi_series(psi, t, [&](const StateVector& v) { return apply(h, v); },
                     operator_scale(h));
}

StateVector matrix_exponential_apply(const LinearOperator& h, double t,
                                     const StateVector& psi,
                                     const std::vector<std::string>& factor_names) {
  require(h.kind() == OperatorKind::Hermitian, "matrix_exponential_apply: h must be hermitian");
  require(h.dim() <= 64, "matrix_exponential_apply: dim > 64 unsupported");
  return expi_series(psi, t,
                     [&](const StateVector& v) { return apply_on_factors(h, v, factor_names); },
                     operator_scale(h));
}

}  // namespace branchlab
