#include "obslab/domain/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>

#include "obslab/domain/operators.hpp"
#include "obslab/domain/rng.hpp"
#include "obslab/errors.hpp"

namespace obslab {

namespace {

constexpr double kResidualTolerance = 1e-6;
constexpr Eigen::Index kDenseLimit = 1500;

void fix_sign(Eigen::VectorXd& v) {
    const double scale = v.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (std::abs(v(k)) > 1e-8 * scale) {
            if (v(k) < 0.0) v = -v;
            return;
        }
    }
}


// Lowest `count` eigenpairs of the symmetric sparse `a` by subspace inverse
// iteration on a - shift (positive definite) with a fixed-seed start block.
void lowest_sparse(const SparseMatrix& a, double shift, Eigen::Index count, Eigen::VectorXd& evals,
                   Eigen::MatrixXd& evecs) {
    const Eigen::Index n = a.rows();
    const Eigen::Index p = std::min(n, count + std::max<Eigen::Index>(count, 8));
    SparseMatrix shifted = a;
    for (Eigen::Index r = 0; r < n; ++r) shifted.coeffRef(r, r) -= shift;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(shifted);
    if (ldlt.info() != Eigen::Success) throw NumericalError("shifted operator factorization failed");

    Xoshiro256 rng(0x5eed);
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index c = 0; c < p; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) x(r, c) = rng.normal();
    }
    for (int it = 0; it < 2000; ++it) {
        const Eigen::MatrixXd y = ldlt.solve(x);
        const Eigen::MatrixXd qb = Eigen::HouseholderQR<Eigen::MatrixXd>(y).householderQ() * Eigen::MatrixXd::Identity(n, p);
        const Eigen::MatrixXd aq = a * qb;
        Eigen::MatrixXd h = qb.transpose() * aq;
        h = 0.5 * (h + h.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(h);
        x = qb * ritz.eigenvectors();
        const Eigen::MatrixXd res = aq * ritz.eigenvectors() - x * ritz.eigenvalues().asDiagonal();
        bool done = true;
        for (Eigen::Index c = 0; c < count && done; ++c) {
            done = res.col(c).norm() <= 1e-10 * std::max(1.0, std::abs(ritz.eigenvalues()(c)));
        }
        if (done) {
            evals = ritz.eigenvalues().head(count);
            evecs = x.leftCols(count);
            return;
        }
    }
    throw NumericalError("subspace iteration did not converge");
}

}  // namespace

EigenBasis dirichlet_eigenpairs(const Grid& grid, const Field& q, std::size_t count) {
    require(q.grid == grid, "potential lives on a different grid");
    const DofMap dofs = make_dofs(grid, BoundaryCondition::Dirichlet);
    require(count >= 1 && count <= dofs.size(), "eigenpair count exceeds interior node count");
    for (double v : q.values) require(std::isfinite(v), "potential must be bounded");

    const Eigen::VectorXd m = mass_diagonal(grid, dofs);
    const Eigen::VectorXd isq = m.cwiseSqrt().cwiseInverse();
    const SparseMatrix k = restrict_form(energy_form(grid), dofs);
    const auto n = static_cast<Eigen::Index>(dofs.size());

    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    if (grid.dimension() == 1) {
        Eigen::VectorXd diag(n), sub(std::max<Eigen::Index>(n - 1, 0));
        for (Eigen::Index r = 0; r < n; ++r) {
            diag(r) = k.coeff(r, r) * isq(r) * isq(r) + q.values[dofs.nodes[r]];
            if (r + 1 < n) sub(r) = k.coeff(r + 1, r) * isq(r) * isq(r + 1);
        }
        solver.computeFromTridiagonal(diag, sub);
        if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
        evals = solver.eigenvalues();
        evecs = solver.eigenvectors();
    } else if (n > kDenseLimit && static_cast<Eigen::Index>(count) < n / 4) {
        SparseMatrix a = isq.asDiagonal() * k * isq.asDiagonal();
        double qmin = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) {
            a.coeffRef(r, r) += q.values[dofs.nodes[r]];
            qmin = std::min(qmin, q.values[dofs.nodes[r]]);
        }
        a.makeCompressed();
        lowest_sparse(a, qmin - 1.0, static_cast<Eigen::Index>(count), evals, evecs);
    } else {
        Eigen::MatrixXd dense = isq.asDiagonal() * Eigen::MatrixXd(k) * isq.asDiagonal();
        for (Eigen::Index r = 0; r < n; ++r) dense(r, r) += q.values[dofs.nodes[r]];
        solver.compute(dense);
        if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
        evals = solver.eigenvalues();
        evecs = solver.eigenvectors();
    }

    EigenBasis basis;
    basis.potential = q;
    for (std::size_t c = 0; c < count; ++c) {
        Eigen::VectorXd y = evecs.col(static_cast<Eigen::Index>(c));
        Eigen::VectorXd phi = isq.cwiseProduct(y);
        fix_sign(phi);
        basis.values.push_back(evals(static_cast<Eigen::Index>(c)));
        basis.functions.push_back(dofs.scatter(grid, phi));
    }
    return basis;
}

double mixed_square_eigenvalue(int k, int l) {
    require(k >= 0 && l >= 0, "mode indices must be nonnegative");
    const double a = k + 0.5;
    const double b = l + 0.5;
    return (a * a + b * b) * std::numbers::pi * std::numbers::pi;
}

MixedMode mixed_square_eigenpairs(const Grid& grid, int k, int l) {
    require(grid.dimension() == 2, "mixed eigenpairs live on the unit square");
    MixedMode mode;
    mode.eigenvalue = mixed_square_eigenvalue(k, l);
    const double a = (k + 0.5) * std::numbers::pi;
    const double b = (l + 0.5) * std::numbers::pi;
    mode.function = Field::sample(grid, [&](double x, double y) {
        return 2.0 * std::cos(a * x) * std::cos(b * y);
    });
    for (std::size_t n = 0; n < grid.size(); ++n) {
        if (grid.on_edge(n, Edge::Right) || grid.on_edge(n, Edge::Top)) mode.function.values[n] = 0.0;
    }
    return mode;
}

std::vector<DampedEigenPair> damped_quadratic_eigenpairs(const Grid& grid, const Field& q,
                                                         const Field& a, std::size_t count) {
    require(q.grid == grid && a.grid == grid, "coefficients live on a different grid");
    const DofMap dofs = make_dofs(grid, BoundaryCondition::Dirichlet);
    const auto n = static_cast<Eigen::Index>(dofs.size());
    require(count >= 1 && count <= 2 * dofs.size(), "too many damped eigenpairs requested");

    const Eigen::MatrixXd op = Eigen::MatrixXd(shifted_laplacian(grid, dofs, q));
    const Eigen::VectorXd damp = dofs.gather(a);
    const Eigen::VectorXd w = mass_diagonal(grid, dofs);

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    companion.topRightCorner(n, n).setIdentity();
    companion.bottomLeftCorner(n, n) = -op;
    companion.bottomRightCorner(n, n) = -Eigen::MatrixXd(damp.asDiagonal());

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, true);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("companion eigensolver broke down");
    }
    const Eigen::VectorXcd mus = solver.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(2 * n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
        const double ai = std::abs(mus(i));
        const double aj = std::abs(mus(j));
        if (std::abs(ai - aj) > 1e-9 * std::max(1.0, ai)) return ai < aj;
        return mus(i).imag() < mus(j).imag();
    });

    auto wnorm = [&](const Eigen::VectorXcd& v) {
        return std::sqrt((w.array() * v.array().abs2()).sum());
    };

    std::vector<DampedEigenPair> out;
    const Eigen::MatrixXcd vecs = solver.eigenvectors();
    for (std::size_t c = 0; c < count; ++c) {
        const auto idx = order[c];
        const std::complex<double> mu = mus(idx);
        Eigen::VectorXcd phi = vecs.col(idx).head(n);
        Eigen::Index peak = 0;
        phi.cwiseAbs().maxCoeff(&peak);
        phi *= std::abs(phi(peak)) / phi(peak);
        phi /= wnorm(phi);

        const Eigen::VectorXcd res =
            op * phi + (damp.array() * phi.array()).matrix() * mu + mu * mu * phi;
        DampedEigenPair pair;
        pair.mu = mu;
        pair.residual = wnorm(res);
        if (!(pair.residual <= kResidualTolerance)) {
            throw NumericalError("damped eigenpair residual " + std::to_string(pair.residual) +
                                 " exceeds tolerance");
        }
        const Eigen::VectorXcd psi = mu * phi;
        pair.phi = {dofs.scatter(grid, phi.real()), dofs.scatter(grid, phi.imag())};
        pair.psi = {dofs.scatter(grid, psi.real()), dofs.scatter(grid, psi.imag())};
        out.push_back(std::move(pair));
    }
    return out;
}

}  // namespace obslab
