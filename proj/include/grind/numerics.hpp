#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <complex>
#include <stdexcept>
#include <string>

namespace grind {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Regularized complex linear least squares with a reusable factorization.
///
/// ridge == 0: thin SVD with a relative singular-value cutoff of 1e-12,
/// giving the minimum-norm solution for rank-deficient systems.
/// ridge > 0: Cholesky solve of the regularized normal equations
/// (A^H A + ridge I) c = A^H b.
class ComplexLlsSolver {
public:
    static constexpr double kSvdCutoff = 1e-12;

    ComplexLlsSolver(ComplexMatrix A, double ridge);

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }

    ComplexVector solve(const ComplexVector& b) const;

    /// Column-wise solve for multiple right-hand sides.
    ComplexMatrix solve(const ComplexMatrix& B) const;

private:
    void check_rhs(Eigen::Index n) const;

    double ridge_;
    Eigen::Index rows_, cols_;
    Eigen::BDCSVD<ComplexMatrix> svd_;
    Eigen::LLT<ComplexMatrix> llt_;
    ComplexMatrix adjoint_;
};

/// Minimizes ||A c - b||^2 + ridge ||c||^2.
ComplexVector solve_complex_lls(const ComplexMatrix& A, const ComplexVector& b, double ridge);

/// One classical fourth-order Runge-Kutta step. State is any Eigen-style
/// value type closed under scaling and addition (VectorXd, ArrayXXd, ...).
template <class Rhs, class State>
State rk4_step(Rhs&& rhs, const State& state, double dt) {
    if (!(dt > 0.0))
        throw std::invalid_argument("rk4_step: dt must be positive");
    State k1 = rhs(state);
    if (k1.size() != state.size())
        throw std::invalid_argument("rk4_step: rhs output shape does not match state");
    State k2 = rhs(state + (0.5 * dt) * k1);
    State k3 = rhs(state + (0.5 * dt) * k2);
    State k4 = rhs(state + dt * k3);
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <class Rhs, class State>
State integrate(Rhs&& rhs, State state, double dt, int n_steps) {
    if (n_steps < 0)
        throw std::invalid_argument("integrate: n_steps must be nonnegative");
    for (int i = 0; i < n_steps; ++i)
        state = rk4_step(rhs, state, dt);
    return state;
}

}  // namespace grind
