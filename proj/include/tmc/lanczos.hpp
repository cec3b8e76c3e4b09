#pragma once

// Iterative extremal-eigenpair solver for sector Hamiltonians too large for
// the dense path: Lanczos with full reorthogonalization and thick-restart via
// the current Ritz vector.

#include <cstdint>
#include <vector>

namespace tmc {

// Compressed sparse rows, symmetric content stored fully.
struct CsrMatrix {
    int dim = 0;
    std::vector<std::int64_t> row_ptr; // dim + 1 entries
    std::vector<int> cols;
    std::vector<double> vals;

    void multiply(const std::vector<double>& x, std::vector<double>& y) const;
};

struct LanczosOptions {
    double rel_tol = 1e-10;   // on the residual |beta * s_last| / max(1, |theta|)
    int max_basis = 150;      // Krylov vectors kept per restart cycle
    int max_restarts = 60;
    std::uint64_t seed = 12345; // deterministic start vector
};

struct LanczosResult {
    double energy = 0.0;
    std::vector<double> vector;
    int iterations = 0; // total matrix-vector products
    double residual = 0.0;
};

// Smallest eigenpair of a symmetric CSR matrix.
LanczosResult lowest_eigenpair(const CsrMatrix& h, const LanczosOptions& opts = {});

} // namespace tmc
