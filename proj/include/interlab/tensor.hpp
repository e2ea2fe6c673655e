#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "interlab/constants.hpp"
#include "interlab/errors.hpp"
#include "interlab/tensor_fwd.hpp"

namespace interlab {

struct Factor {
    std::string label;
    std::size_t dim = 1;
};

// Ordered list of labeled tensor factors. Composite indices are row-major in
// factor order: the first factor is the most significant digit. This ordering
// is fixed once here and used by every module.
class IndexSpace {
public:
    IndexSpace() = default;
    explicit IndexSpace(std::vector<Factor> factors);

    static IndexSpace single(const std::string& label, std::size_t dim);
    static IndexSpace concat(const IndexSpace& a, const IndexSpace& b);

    std::size_t total_dim() const { return total_dim_; }
    const std::vector<Factor>& factors() const { return factors_; }
    std::size_t factor_count() const { return factors_.size(); }

    std::size_t factor_index(const std::string& label) const;  // throws LabelError
    bool has_factor(const std::string& label) const;

    // Stride of a factor in the flattened index (row-major).
    std::size_t stride(std::size_t factor) const;

    std::size_t flatten(const std::vector<std::size_t>& digits) const;
    std::vector<std::size_t> unflatten(std::size_t index) const;

    bool same_shape(const IndexSpace& other) const;  // labels and dims equal

private:
    std::vector<Factor> factors_;
    std::size_t total_dim_ = 1;
};

struct StateVector {
    IndexSpace space;
    std::vector<cdouble> amps;
    // Sub-normalized vectors are legal for lossy scenarios (slit absorption).
    bool lossy = false;

    StateVector() = default;
    StateVector(IndexSpace s, std::vector<cdouble> a, bool lossy_flag = false);

    static StateVector basis(const IndexSpace& s, std::size_t index);

    std::size_t dim() const { return amps.size(); }
    double norm() const;
    double norm_sq() const;
    StateVector normalized() const;
};

cdouble inner(const StateVector& a, const StateVector& b);  // <a|b>
StateVector operator+(const StateVector& a, const StateVector& b);
StateVector operator-(const StateVector& a, const StateVector& b);
StateVector operator*(cdouble c, const StateVector& v);
StateVector tensor_product(const StateVector& a, const StateVector& b);

enum class OpKind { general, hermitian, unitary, psd };

// Dense complex square matrix over an IndexSpace, row-major storage.
// Construction validates the declared kind against the entries.
class ComplexOperator {
public:
    ComplexOperator() = default;
    ComplexOperator(IndexSpace space, std::vector<cdouble> entries,
                    OpKind kind = OpKind::general);

    static ComplexOperator identity(const IndexSpace& space);
    static ComplexOperator zero(const IndexSpace& space);
    // Rank-one |a><b|.
    static ComplexOperator outer(const StateVector& a, const StateVector& b);

    const IndexSpace& space() const { return space_; }
    OpKind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }

    cdouble at(std::size_t r, std::size_t c) const { return m_[r * dim_ + c]; }
    cdouble& at(std::size_t r, std::size_t c) { return m_[r * dim_ + c]; }
    const std::vector<cdouble>& data() const { return m_; }
    std::vector<cdouble>& data() { return m_; }

    ComplexOperator adjoint() const;
    cdouble trace() const;
    double max_abs() const;

    StateVector apply(const StateVector& v) const;
    // <v| this |v>, real part (used for probabilities).
    double expectation(const StateVector& v) const;

    // Re-tag the kind after an external guarantee; still validated.
    ComplexOperator with_kind(OpKind kind) const;

private:
    IndexSpace space_;
    std::size_t dim_ = 0;
    std::vector<cdouble> m_;
    OpKind kind_ = OpKind::general;

    void validate_kind() const;
};

ComplexOperator operator*(const ComplexOperator& a, const ComplexOperator& b);
ComplexOperator operator+(const ComplexOperator& a, const ComplexOperator& b);
ComplexOperator operator-(const ComplexOperator& a, const ComplexOperator& b);
ComplexOperator operator*(cdouble c, const ComplexOperator& a);

double max_abs_diff(const ComplexOperator& a, const ComplexOperator& b);
bool is_unitary(const ComplexOperator& a, double tol = EPS_NORM);
bool is_hermitian(const ComplexOperator& a, double tol = EPS_NORM);

// Kronecker product; result space is the concatenation of the factor lists.
// Throws CapacityExceeded past the dimension cap.
ComplexOperator tensor_product(const ComplexOperator& a, const ComplexOperator& b,
                               std::size_t dim_cap = DIM_CAP);

// Trace over every factor not listed in `keep`. Kept factors retain their
// original relative order. Throws LabelError for unknown labels.
ComplexOperator partial_trace(const ComplexOperator& op,
                              const std::vector<std::string>& keep);

struct EigenSystem {
    std::vector<double> eigenvalues;   // descending
    ComplexOperator eigenvectors;      // orthonormal columns, same order
};

// Spectral decomposition of a Hermitian operator. Throws KindError otherwise.
EigenSystem hermitian_eigensystem(const ComplexOperator& op);

// Sum of absolute eigenvalues. Requires a Hermitian operator.
double trace_norm(const ComplexOperator& op);

// Unitary mapping each in-vector to its out-vector. Both families must be
// orthonormal (GeometryError otherwise). The complement is completed
// deterministically: canonical basis vectors are orthogonalized in index order
// on both sides and paired up.
ComplexOperator extend_to_unitary(
    const std::vector<std::pair<StateVector, StateVector>>& pairs);

} // namespace interlab
