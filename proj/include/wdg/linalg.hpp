#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace wdg {

/// Compressed sparse row structure: column indices sorted and unique per row.
struct CsrPattern {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<int> col_idx;

    std::size_t nnz() const { return col_idx.size(); }
    /// Position of (row, col) in col_idx, or -1 when outside the pattern.
    std::ptrdiff_t find(std::size_t row, int col) const;
};

struct Triplet {
    int row;
    int col;
    double value;
};

/// CSR matrix whose pattern may be shared between matrices; matrices built on
/// the same pattern object combine by adding their value arrays.
class SparseMatrix {
public:
    SparseMatrix() = default;
    explicit SparseMatrix(std::shared_ptr<const CsrPattern> pattern);

    /// Compresses coordinate triplets, summing duplicates.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                      std::span<const Triplet> triplets);
    static SparseMatrix identity(std::size_t n);

    std::size_t rows() const { return pattern_->rows; }
    std::size_t cols() const { return pattern_->cols; }
    std::size_t nnz() const { return pattern_->nnz(); }
    const CsrPattern& pattern() const { return *pattern_; }
    const std::shared_ptr<const CsrPattern>& shared_pattern() const { return pattern_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    /// Entry (row, col), zero outside the pattern.
    double coeff(std::size_t row, int col) const;

    /// Adds a dense row-major block at (row0, col0). Each block row must map to
    /// `ncols` consecutive pattern entries.
    void add_block(std::size_t row0, int col0, int nrows, int ncols, const double* block);

    void set_zero();
    void scale(double s);
    /// this += s * other. Patterns must coincide (same object or equal structure).
    void add_scaled(double s, const SparseMatrix& other);

    /// y = A x.
    void multiply(std::span<const double> x, std::span<double> y) const;
    /// y += s * A x.
    void multiply_add(double s, std::span<const double> x, std::span<double> y) const;

    SparseMatrix transpose() const;
    double max_abs() const;

private:
    std::shared_ptr<const CsrPattern> pattern_;
    std::vector<double> values_;
};

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x);

/// alpha * A + beta * B for arbitrary patterns.
SparseMatrix linear_combination(double alpha, const SparseMatrix& a, double beta,
                                const SparseMatrix& b);

/// x^T A y.
double bilinear(const SparseMatrix& a, std::span<const double> x, std::span<const double> y);

enum class SolverMethod { Direct, Iterative };

struct SolverSpec {
    SolverMethod method = SolverMethod::Direct;
    int max_iter = 2000;
    /// Relative residual target for Iterative; must lie in (0, 1e-6].
    double tolerance = 1e-12;
    /// Use conjugate gradients instead of BiCGSTAB (matrix must be SPD).
    bool symmetric = false;
    /// Block size of the block-Jacobi preconditioner (1 = diagonal scaling).
    int block_size = 1;

    void validate() const;
};

struct SolveInfo {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Solves A x = b. For Iterative, x holds the initial guess on entry.
/// Throws SolverError on breakdown, non-convergence or a violated residual
/// contract (Iterative: tol * ||b||, Direct: 1e-10 * ||b||).
SolveInfo solve(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                const SolverSpec& spec);
std::vector<double> solve(const SparseMatrix& a, std::span<const double> b,
                          const SolverSpec& spec = {});

void write_matrix_market(std::ostream& os, const SparseMatrix& a);

double norm2(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

}  // namespace wdg
