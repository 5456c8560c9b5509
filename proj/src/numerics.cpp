#include "grind/numerics.hpp"

namespace grind {

ComplexLlsSolver::ComplexLlsSolver(ComplexMatrix A, double ridge)
    : ridge_(ridge), rows_(A.rows()), cols_(A.cols()) {
    if (rows_ == 0 || cols_ == 0)
        throw std::invalid_argument("ComplexLlsSolver: empty design matrix");
    if (!A.allFinite())
        throw std::invalid_argument("ComplexLlsSolver: design matrix has non-finite entries");
    if (ridge_ < 0.0)
        throw std::invalid_argument("ComplexLlsSolver: ridge must be nonnegative");
    if (ridge_ == 0.0) {
        svd_.setThreshold(kSvdCutoff);
        svd_.compute(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    } else {
        adjoint_ = A.adjoint();
        ComplexMatrix gram = adjoint_ * A;
        gram.diagonal().array() += ridge_;
        llt_.compute(gram);
        if (llt_.info() != Eigen::Success)
            throw std::runtime_error("ComplexLlsSolver: Cholesky factorization failed");
    }
}

void ComplexLlsSolver::check_rhs(Eigen::Index n) const {
    if (n != rows_)
        throw std::invalid_argument("ComplexLlsSolver: rhs has " + std::to_string(n) +
                                    " rows, expected " + std::to_string(rows_));
}

ComplexVector ComplexLlsSolver::solve(const ComplexVector& b) const {
    check_rhs(b.size());
    if (!b.allFinite())
        throw std::invalid_argument("ComplexLlsSolver: rhs has non-finite entries");
    if (ridge_ == 0.0)
        return svd_.solve(b);
    return llt_.solve(adjoint_ * b);
}

ComplexMatrix ComplexLlsSolver::solve(const ComplexMatrix& B) const {
    check_rhs(B.rows());
    if (!B.allFinite())
        throw std::invalid_argument("ComplexLlsSolver: rhs has non-finite entries");
    if (ridge_ == 0.0)
        return svd_.solve(B);
    return llt_.solve(adjoint_ * B);
}

ComplexVector solve_complex_lls(const ComplexMatrix& A, const ComplexVector& b, double ridge) {
    return ComplexLlsSolver(A, ridge).solve(b);
}

}  // namespace grind
