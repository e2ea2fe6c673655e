#include "interlab/reference.hpp"

#include "interlab/tensor.hpp"

namespace interlab::reference {

void multiply(cdouble* c, const cdouble* a, const cdouble* b, std::size_t dim) {
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            cdouble acc(0.0, 0.0);
            for (std::size_t k = 0; k < dim; ++k) acc += a[i * dim + k] * b[k * dim + j];
            c[i * dim + j] = acc;
        }
    }
}

void kron(cdouble* c, const cdouble* a, std::size_t da, const cdouble* b,
          std::size_t db) {
    const std::size_t n = da * db;
    for (std::size_t ia = 0; ia < da; ++ia)
        for (std::size_t ib = 0; ib < db; ++ib)
            for (std::size_t ja = 0; ja < da; ++ja)
                for (std::size_t jb = 0; jb < db; ++jb)
                    c[(ia * db + ib) * n + (ja * db + jb)] =
                        a[ia * da + ja] * b[ib * db + jb];
}

void matvec(cdouble* y, const cdouble* a, const cdouble* x, std::size_t dim) {
    for (std::size_t i = 0; i < dim; ++i) {
        cdouble acc(0.0, 0.0);
        for (std::size_t j = 0; j < dim; ++j) acc += a[i * dim + j] * x[j];
        y[i] = acc;
    }
}

ComplexOperator partial_trace(const ComplexOperator& op,
                              const std::vector<std::string>& keep) {
    const IndexSpace& space = op.space();
    std::vector<bool> kept(space.factor_count(), false);
    for (const auto& label : keep) kept[space.factor_index(label)] = true;

    std::vector<Factor> kept_factors, traced_factors;
    std::vector<std::size_t> kept_pos, traced_pos;
    for (std::size_t f = 0; f < space.factor_count(); ++f) {
        if (kept[f]) {
            kept_factors.push_back(space.factors()[f]);
            kept_pos.push_back(f);
        } else {
            traced_factors.push_back(space.factors()[f]);
            traced_pos.push_back(f);
        }
    }

    IndexSpace out_space{kept_factors};
    const std::size_t out_dim = out_space.total_dim();
    std::size_t traced_dim = 1;
    for (const auto& f : traced_factors) traced_dim *= f.dim;

    std::vector<cdouble> out(out_dim * out_dim, cdouble(0.0, 0.0));
    std::vector<std::size_t> digits_r(space.factor_count(), 0);
    std::vector<std::size_t> digits_c(space.factor_count(), 0);

    for (std::size_t r = 0; r < out_dim; ++r) {
        const auto kept_r = out_space.unflatten(r);
        for (std::size_t c = 0; c < out_dim; ++c) {
            const auto kept_c = out_space.unflatten(c);
            cdouble acc(0.0, 0.0);
            for (std::size_t e = 0; e < traced_dim; ++e) {
                // Spell the traced multi-index out digit by digit.
                std::size_t rem = e;
                for (std::size_t t = traced_factors.size(); t-- > 0;) {
                    const std::size_t d = traced_factors[t].dim;
                    const std::size_t digit = rem % d;
                    rem /= d;
                    digits_r[traced_pos[t]] = digit;
                    digits_c[traced_pos[t]] = digit;
                }
                for (std::size_t k = 0; k < kept_pos.size(); ++k) {
                    digits_r[kept_pos[k]] = kept_r[k];
                    digits_c[kept_pos[k]] = kept_c[k];
                }
                acc += op.at(space.flatten(digits_r), space.flatten(digits_c));
            }
            out[r * out_dim + c] = acc;
        }
    }
    return ComplexOperator(out_space, std::move(out));
}

} // namespace interlab::reference
