#include "tmc/lanczos.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "tmc/errors.hpp"
#include "tmc/rng.hpp"

namespace tmc {

void CsrMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(static_cast<std::size_t>(dim), 0.0);
    for (int row = 0; row < dim; ++row) {
        double acc = 0.0;
        for (std::int64_t k = row_ptr[row]; k < row_ptr[row + 1]; ++k)
            acc += vals[static_cast<std::size_t>(k)] *
                   x[static_cast<std::size_t>(cols[static_cast<std::size_t>(k)])];
        y[static_cast<std::size_t>(row)] = acc;
    }
}

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += alpha * x[k];
}

void scale(double alpha, std::vector<double>& v) {
    for (double& x : v) x *= alpha;
}

} // namespace

LanczosResult lowest_eigenpair(const CsrMatrix& h, const LanczosOptions& opts) {
    const std::size_t n = static_cast<std::size_t>(h.dim);
    if (h.dim < 1) throw ConfigError("lanczos: empty matrix");

    // Deterministic random start vector.
    std::vector<double> v(n);
    CounterRng rng = CounterRng::from_seed(opts.seed);
    for (double& x : v) x = rng.uniform01() - 0.5;
    scale(1.0 / norm2(v), v);

    LanczosResult result;
    std::vector<std::vector<double>> basis;         // orthonormal Lanczos vectors
    std::vector<double> alpha, beta;                // tridiagonal entries
    std::vector<double> w(n);

    for (int restart = 0; restart < opts.max_restarts; ++restart) {
        basis.clear();
        alpha.clear();
        beta.clear();

        for (int j = 0; j < opts.max_basis; ++j) {
            basis.push_back(v);
            h.multiply(v, w);
            ++result.iterations;
            alpha.push_back(dot(v, w));

            // Full reorthogonalization, two passes for stability.
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& q : basis) axpy(-dot(q, w), q, w);

            const double b = norm2(w);
            const int k = j + 1;

            // Ritz value and residual from the k x k tridiagonal block.
            Eigen::VectorXd diag(k), sub(k > 1 ? k - 1 : 0);
            for (int i = 0; i < k; ++i) diag(i) = alpha[static_cast<std::size_t>(i)];
            for (int i = 0; i + 1 < k; ++i) sub(i) = beta[static_cast<std::size_t>(i)];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
            es.computeFromTridiagonal(diag, sub);
            const double theta = es.eigenvalues()(0);
            const double s_last = es.eigenvectors()(k - 1, 0);
            const double residual = std::abs(b * s_last);
            result.energy = theta;
            result.residual = residual;

            const bool converged = residual <= opts.rel_tol * std::max(1.0, std::abs(theta));
            const bool breakdown = b <= 1e-14;
            if (converged || breakdown || j + 1 == opts.max_basis) {
                // Assemble the Ritz vector for return or restart.
                std::vector<double> ritz(n, 0.0);
                for (int i = 0; i < k; ++i)
                    axpy(es.eigenvectors()(i, 0), basis[static_cast<std::size_t>(i)], ritz);
                const double rn = norm2(ritz);
                if (rn > 0.0) scale(1.0 / rn, ritz);
                if (converged || breakdown) {
                    result.vector = std::move(ritz);
                    return result;
                }
                v = std::move(ritz); // restart from the current best approximation
                break;
            }

            beta.push_back(b);
            v = w;
            scale(1.0 / b, v);
        }
    }
    throw ConvergenceError("lanczos: no convergence after " +
                           std::to_string(result.iterations) +
                           " matrix-vector products (residual " +
                           std::to_string(result.residual) + ")");
}

} // namespace tmc
