#include "interlab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <Eigen/Dense>

#include "interlab/kernels.hpp"

namespace interlab {

// ---------------------------------------------------------------------------
// IndexSpace

IndexSpace::IndexSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
    std::set<std::string> seen;
    total_dim_ = 1;
    for (const auto& f : factors_) {
        if (f.dim < 1) throw LabelError("factor '" + f.label + "' has dimension 0");
        if (!seen.insert(f.label).second)
            throw LabelError("duplicate factor label '" + f.label + "'");
        total_dim_ *= f.dim;
    }
}

IndexSpace IndexSpace::single(const std::string& label, std::size_t dim) {
    return IndexSpace({Factor{label, dim}});
}

IndexSpace IndexSpace::concat(const IndexSpace& a, const IndexSpace& b) {
    std::vector<Factor> combined = a.factors_;
    combined.insert(combined.end(), b.factors_.begin(), b.factors_.end());
    return IndexSpace(std::move(combined));
}

std::size_t IndexSpace::factor_index(const std::string& label) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].label == label) return i;
    throw LabelError("unknown factor label '" + label + "'");
}

bool IndexSpace::has_factor(const std::string& label) const {
    for (const auto& f : factors_)
        if (f.label == label) return true;
    return false;
}

std::size_t IndexSpace::stride(std::size_t factor) const {
    std::size_t s = 1;
    for (std::size_t i = factors_.size(); i-- > factor + 1;) s *= factors_[i].dim;
    return s;
}

std::size_t IndexSpace::flatten(const std::vector<std::size_t>& digits) const {
    std::size_t index = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i)
        index = index * factors_[i].dim + digits[i];
    return index;
}

std::vector<std::size_t> IndexSpace::unflatten(std::size_t index) const {
    std::vector<std::size_t> digits(factors_.size(), 0);
    for (std::size_t i = factors_.size(); i-- > 0;) {
        digits[i] = index % factors_[i].dim;
        index /= factors_[i].dim;
    }
    return digits;
}

bool IndexSpace::same_shape(const IndexSpace& other) const {
    if (factors_.size() != other.factors_.size()) return false;
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].label != other.factors_[i].label ||
            factors_[i].dim != other.factors_[i].dim)
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(IndexSpace s, std::vector<cdouble> a, bool lossy_flag)
    : space(std::move(s)), amps(std::move(a)), lossy(lossy_flag) {
    if (amps.size() != space.total_dim())
        throw SpaceError("amplitude count does not match space dimension");
}

StateVector StateVector::basis(const IndexSpace& s, std::size_t index) {
    std::vector<cdouble> a(s.total_dim(), cdouble(0.0, 0.0));
    a.at(index) = cdouble(1.0, 0.0);
    return StateVector(s, std::move(a));
}

double StateVector::norm_sq() const {
    double acc = 0.0;
    for (const auto& c : amps) acc += std::norm(c);
    return acc;
}

double StateVector::norm() const { return std::sqrt(norm_sq()); }

StateVector StateVector::normalized() const {
    const double n = norm();
    if (n <= 0.0) throw GeometryError("cannot normalize a zero vector");
    StateVector out = *this;
    for (auto& c : out.amps) c /= n;
    return out;
}

cdouble inner(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw SpaceError("inner product dimension mismatch");
    cdouble acc(0.0, 0.0);
    for (std::size_t i = 0; i < a.amps.size(); ++i)
        acc += std::conj(a.amps[i]) * b.amps[i];
    return acc;
}

StateVector operator+(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw SpaceError("vector sum dimension mismatch");
    StateVector out = a;
    for (std::size_t i = 0; i < out.amps.size(); ++i) out.amps[i] += b.amps[i];
    return out;
}

StateVector operator-(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw SpaceError("vector difference dimension mismatch");
    StateVector out = a;
    for (std::size_t i = 0; i < out.amps.size(); ++i) out.amps[i] -= b.amps[i];
    return out;
}

StateVector operator*(cdouble c, const StateVector& v) {
    StateVector out = v;
    for (auto& a : out.amps) a *= c;
    return out;
}

StateVector tensor_product(const StateVector& a, const StateVector& b) {
    IndexSpace space = IndexSpace::concat(a.space, b.space);
    std::vector<cdouble> out(space.total_dim());
    const std::size_t db = b.dim();
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < db; ++j) out[i * db + j] = a.amps[i] * b.amps[j];
    return StateVector(std::move(space), std::move(out), a.lossy || b.lossy);
}

// ---------------------------------------------------------------------------
// ComplexOperator

namespace {

using EigenMatrix =
    Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenMatrix> as_eigen(const ComplexOperator& op) {
    return Eigen::Map<const EigenMatrix>(op.data().data(),
                                         static_cast<Eigen::Index>(op.dim()),
                                         static_cast<Eigen::Index>(op.dim()));
}

} // namespace

ComplexOperator::ComplexOperator(IndexSpace space, std::vector<cdouble> entries,
                                 OpKind kind)
    : space_(std::move(space)), dim_(space_.total_dim()), m_(std::move(entries)),
      kind_(kind) {
    if (m_.size() != dim_ * dim_)
        throw SpaceError("entry count does not match space dimension");
    validate_kind();
}

void ComplexOperator::validate_kind() const {
    if (kind_ == OpKind::general) return;
    if (kind_ == OpKind::unitary) {
        if (!is_unitary(*this))
            throw KindError("operator tagged unitary fails A^dag A = 1");
        return;
    }
    // hermitian and psd both require Hermiticity.
    if (!is_hermitian(*this))
        throw KindError("operator tagged hermitian/psd is not Hermitian");
    if (kind_ == OpKind::psd) {
        Eigen::SelfAdjointEigenSolver<EigenMatrix> solver(
            as_eigen(*this), Eigen::EigenvaluesOnly);
        if (solver.eigenvalues().minCoeff() < -EPS_NORM * std::max<double>(1.0, max_abs()))
            throw KindError("operator tagged psd has a negative eigenvalue");
    }
}

ComplexOperator ComplexOperator::identity(const IndexSpace& space) {
    const std::size_t d = space.total_dim();
    std::vector<cdouble> m(d * d, cdouble(0.0, 0.0));
    for (std::size_t i = 0; i < d; ++i) m[i * d + i] = cdouble(1.0, 0.0);
    return ComplexOperator(space, std::move(m), OpKind::unitary);
}

ComplexOperator ComplexOperator::zero(const IndexSpace& space) {
    const std::size_t d = space.total_dim();
    return ComplexOperator(space, std::vector<cdouble>(d * d, cdouble(0.0, 0.0)),
                           OpKind::hermitian);
}

ComplexOperator ComplexOperator::outer(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw SpaceError("outer product dimension mismatch");
    const std::size_t d = a.dim();
    std::vector<cdouble> m(d * d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
            m[r * d + c] = a.amps[r] * std::conj(b.amps[c]);
    return ComplexOperator(a.space, std::move(m));
}

ComplexOperator ComplexOperator::adjoint() const {
    std::vector<cdouble> m(dim_ * dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c)
            m[c * dim_ + r] = std::conj(m_[r * dim_ + c]);
    // Hermitian, psd and unitary kinds survive the adjoint.
    return ComplexOperator(space_, std::move(m), kind_);
}

cdouble ComplexOperator::trace() const {
    cdouble acc(0.0, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) acc += m_[i * dim_ + i];
    return acc;
}

double ComplexOperator::max_abs() const {
    double mx = 0.0;
    for (const auto& c : m_) mx = std::max(mx, std::abs(c));
    return mx;
}

StateVector ComplexOperator::apply(const StateVector& v) const {
    if (v.dim() != dim_) throw SpaceError("operator/vector dimension mismatch");
    std::vector<cdouble> out(dim_);
    kernels::matvec(out.data(), m_.data(), v.amps.data(), dim_);
    return StateVector(space_, std::move(out), v.lossy);
}

double ComplexOperator::expectation(const StateVector& v) const {
    const StateVector w = apply(v);
    return inner(v, w).real();
}

ComplexOperator ComplexOperator::with_kind(OpKind kind) const {
    return ComplexOperator(space_, m_, kind);
}

ComplexOperator operator*(const ComplexOperator& a, const ComplexOperator& b) {
    if (a.dim() != b.dim()) throw SpaceError("operator product dimension mismatch");
    std::vector<cdouble> m(a.dim() * a.dim());
    kernels::multiply(m.data(), a.data().data(), b.data().data(), a.dim());
    return ComplexOperator(a.space(), std::move(m));
}

ComplexOperator operator+(const ComplexOperator& a, const ComplexOperator& b) {
    if (a.dim() != b.dim()) throw SpaceError("operator sum dimension mismatch");
    std::vector<cdouble> m = a.data();
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += b.data()[i];
    return ComplexOperator(a.space(), std::move(m));
}

ComplexOperator operator-(const ComplexOperator& a, const ComplexOperator& b) {
    if (a.dim() != b.dim()) throw SpaceError("operator difference dimension mismatch");
    std::vector<cdouble> m = a.data();
    for (std::size_t i = 0; i < m.size(); ++i) m[i] -= b.data()[i];
    return ComplexOperator(a.space(), std::move(m));
}

ComplexOperator operator*(cdouble c, const ComplexOperator& a) {
    std::vector<cdouble> m = a.data();
    for (auto& x : m) x *= c;
    return ComplexOperator(a.space(), std::move(m));
}

double max_abs_diff(const ComplexOperator& a, const ComplexOperator& b) {
    if (a.dim() != b.dim()) throw SpaceError("comparison dimension mismatch");
    double mx = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        mx = std::max(mx, std::abs(a.data()[i] - b.data()[i]));
    return mx;
}

bool is_unitary(const ComplexOperator& a, double tol) {
    const std::size_t d = a.dim();
    // max entry of |A^dag A - 1|
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            cdouble acc(0.0, 0.0);
            for (std::size_t k = 0; k < d; ++k)
                acc += std::conj(a.at(k, r)) * a.at(k, c);
            if (r == c) acc -= 1.0;
            if (std::abs(acc) > tol) return false;
        }
    }
    return true;
}

bool is_hermitian(const ComplexOperator& a, double tol) {
    const std::size_t d = a.dim();
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = r; c < d; ++c)
            if (std::abs(a.at(r, c) - std::conj(a.at(c, r))) > tol) return false;
    return true;
}

ComplexOperator tensor_product(const ComplexOperator& a, const ComplexOperator& b,
                               std::size_t dim_cap) {
    const std::size_t d = a.dim() * b.dim();
    if (d > dim_cap)
        throw CapacityExceeded("tensor product dimension " + std::to_string(d) +
                               " exceeds cap " + std::to_string(dim_cap));
    IndexSpace space = IndexSpace::concat(a.space(), b.space());
    std::vector<cdouble> m(d * d);
    kernels::kron(m.data(), a.data().data(), a.dim(), b.data().data(), b.dim());
    OpKind kind = OpKind::general;
    if (a.kind() == b.kind() &&
        (a.kind() == OpKind::unitary || a.kind() == OpKind::hermitian ||
         a.kind() == OpKind::psd))
        kind = a.kind();
    return ComplexOperator(std::move(space), std::move(m), kind);
}

ComplexOperator partial_trace(const ComplexOperator& op,
                              const std::vector<std::string>& keep) {
    const IndexSpace& space = op.space();
    std::vector<bool> kept(space.factor_count(), false);
    for (const auto& label : keep) kept[space.factor_index(label)] = true;

    std::vector<Factor> kept_factors;
    std::vector<std::size_t> kept_stride, traced_dims, traced_stride;
    for (std::size_t f = 0; f < space.factor_count(); ++f) {
        if (kept[f]) {
            kept_factors.push_back(space.factors()[f]);
            kept_stride.push_back(space.stride(f));
        } else {
            traced_dims.push_back(space.factors()[f].dim);
            traced_stride.push_back(space.stride(f));
        }
    }

    IndexSpace out_space{kept_factors};
    const std::size_t out_dim = out_space.total_dim();
    std::size_t traced_dim = 1;
    for (auto d : traced_dims) traced_dim *= d;

    // Flattened offsets of every kept and traced multi-index.
    std::vector<std::size_t> kept_offsets(out_dim, 0);
    for (std::size_t r = 0; r < out_dim; ++r) {
        auto digits = out_space.unflatten(r);
        std::size_t off = 0;
        for (std::size_t k = 0; k < digits.size(); ++k) off += digits[k] * kept_stride[k];
        kept_offsets[r] = off;
    }
    std::vector<std::size_t> traced_offsets(traced_dim, 0);
    for (std::size_t e = 0; e < traced_dim; ++e) {
        std::size_t rem = e, off = 0;
        for (std::size_t t = traced_dims.size(); t-- > 0;) {
            off += (rem % traced_dims[t]) * traced_stride[t];
            rem /= traced_dims[t];
        }
        traced_offsets[e] = off;
    }

    const std::size_t full = space.total_dim();
    std::vector<cdouble> out(out_dim * out_dim, cdouble(0.0, 0.0));
    for (std::size_t r = 0; r < out_dim; ++r) {
        for (std::size_t c = 0; c < out_dim; ++c) {
            cdouble acc(0.0, 0.0);
            for (std::size_t e = 0; e < traced_dim; ++e)
                acc += op.data()[(kept_offsets[r] + traced_offsets[e]) * full +
                                 kept_offsets[c] + traced_offsets[e]];
            out[r * out_dim + c] = acc;
        }
    }
    return ComplexOperator(std::move(out_space), std::move(out));
}

EigenSystem hermitian_eigensystem(const ComplexOperator& op) {
    if (op.kind() != OpKind::hermitian && op.kind() != OpKind::psd) {
        if (!is_hermitian(op))
            throw KindError("hermitian_eigensystem requires a Hermitian operator");
    }
    Eigen::SelfAdjointEigenSolver<EigenMatrix> solver(as_eigen(op));
    if (solver.info() != Eigen::Success)
        throw KindError("eigensolver failed to converge");

    const std::size_t d = op.dim();
    EigenSystem out;
    out.eigenvalues.resize(d);
    std::vector<cdouble> vecs(d * d);
    // Eigen returns ascending order; flip to descending.
    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t src = d - 1 - k;
        out.eigenvalues[k] = solver.eigenvalues()(static_cast<Eigen::Index>(src));
        for (std::size_t r = 0; r < d; ++r)
            vecs[r * d + k] = solver.eigenvectors()(static_cast<Eigen::Index>(r),
                                                    static_cast<Eigen::Index>(src));
    }
    out.eigenvectors = ComplexOperator(op.space(), std::move(vecs));
    return out;
}

double trace_norm(const ComplexOperator& op) {
    const EigenSystem es = hermitian_eigensystem(op);
    double acc = 0.0;
    for (double v : es.eigenvalues) acc += std::abs(v);
    return acc;
}

namespace {

// Modified Gram-Schmidt with one re-orthogonalization pass.
void orthogonalize(std::vector<cdouble>& v, const std::vector<std::vector<cdouble>>& basis) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& u : basis) {
            cdouble overlap(0.0, 0.0);
            for (std::size_t i = 0; i < v.size(); ++i)
                overlap += std::conj(u[i]) * v[i];
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= overlap * u[i];
        }
    }
}

double vec_norm(const std::vector<cdouble>& v) {
    double acc = 0.0;
    for (const auto& c : v) acc += std::norm(c);
    return std::sqrt(acc);
}

// Extend an orthonormal family to a full orthonormal basis by orthogonalizing
// canonical basis vectors in index order.
std::vector<std::vector<cdouble>> complete_basis(
    std::vector<std::vector<cdouble>> family, std::size_t dim) {
    for (std::size_t e = 0; e < dim && family.size() < dim; ++e) {
        std::vector<cdouble> v(dim, cdouble(0.0, 0.0));
        v[e] = cdouble(1.0, 0.0);
        orthogonalize(v, family);
        const double n = vec_norm(v);
        if (n < 1e-7) continue;  // already in span
        for (auto& c : v) c /= n;
        family.push_back(std::move(v));
    }
    if (family.size() != dim)
        throw GeometryError("basis completion failed to reach full dimension");
    return family;
}

} // namespace

ComplexOperator extend_to_unitary(
    const std::vector<std::pair<StateVector, StateVector>>& pairs) {
    if (pairs.empty()) throw GeometryError("extend_to_unitary needs at least one pair");
    const IndexSpace space = pairs.front().first.space;
    const std::size_t d = space.total_dim();

    std::vector<std::vector<cdouble>> ins, outs;
    for (const auto& [in, out] : pairs) {
        if (in.dim() != d || out.dim() != d)
            throw SpaceError("extend_to_unitary pair on a different space");
        ins.push_back(in.amps);
        outs.push_back(out.amps);
    }
    // Orthonormality of both families.
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const cdouble gi = inner(pairs[i].first, pairs[j].first) -
                               (i == j ? cdouble(1.0, 0.0) : cdouble(0.0, 0.0));
            const cdouble go = inner(pairs[i].second, pairs[j].second) -
                               (i == j ? cdouble(1.0, 0.0) : cdouble(0.0, 0.0));
            if (std::abs(gi) > 1e-8 || std::abs(go) > 1e-8)
                throw GeometryError("extend_to_unitary requires orthonormal families");
        }
    }

    const auto full_in = complete_basis(std::move(ins), d);
    const auto full_out = complete_basis(std::move(outs), d);

    // U = sum_k |out_k><in_k|
    std::vector<cdouble> m(d * d, cdouble(0.0, 0.0));
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t r = 0; r < d; ++r) {
            if (full_out[k][r] == cdouble(0.0, 0.0)) continue;
            for (std::size_t c = 0; c < d; ++c)
                m[r * d + c] += full_out[k][r] * std::conj(full_in[k][c]);
        }

    ComplexOperator u(space, std::move(m));
    if (!is_unitary(u, RECON_TOL))
        throw GeometryError("unitary completion check failed");
    return u.with_kind(OpKind::unitary);
}

} // namespace interlab
