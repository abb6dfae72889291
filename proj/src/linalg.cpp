#include "wdg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "wdg/error.hpp"

namespace wdg {

std::ptrdiff_t CsrPattern::find(std::size_t row, int col) const {
    const auto first = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[row]);
    const auto last = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[row + 1]);
    const auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col) return -1;
    return it - col_idx.begin();
}

SparseMatrix::SparseMatrix(std::shared_ptr<const CsrPattern> pattern)
    : pattern_(std::move(pattern)), values_(pattern_->nnz(), 0.0) {}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::span<const Triplet> triplets) {
    std::vector<Triplet> sorted(triplets.begin(), triplets.end());
    for (const auto& t : sorted) {
        if (t.row < 0 || static_cast<std::size_t>(t.row) >= rows || t.col < 0 ||
            static_cast<std::size_t>(t.col) >= cols) {
            throw ConfigError("from_triplets: index out of range");
        }
    }
    std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    auto pattern = std::make_shared<CsrPattern>();
    pattern->rows = rows;
    pattern->cols = cols;
    pattern->row_ptr.assign(rows + 1, 0);
    std::vector<double> values;
    for (std::size_t i = 0; i < sorted.size();) {
        const Triplet& t = sorted[i];
        double sum = 0.0;
        std::size_t j = i;
        while (j < sorted.size() && sorted[j].row == t.row && sorted[j].col == t.col) {
            sum += sorted[j].value;
            ++j;
        }
        pattern->col_idx.push_back(t.col);
        values.push_back(sum);
        ++pattern->row_ptr[t.row + 1];
        i = j;
    }
    std::partial_sum(pattern->row_ptr.begin(), pattern->row_ptr.end(), pattern->row_ptr.begin());
    SparseMatrix m(std::move(pattern));
    m.values_ = std::move(values);
    return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    std::vector<Triplet> t;
    t.reserve(n);
    for (std::size_t i = 0; i < n; ++i) t.push_back({static_cast<int>(i), static_cast<int>(i), 1.0});
    return from_triplets(n, n, t);
}

double SparseMatrix::coeff(std::size_t row, int col) const {
    const auto pos = pattern_->find(row, col);
    return pos < 0 ? 0.0 : values_[pos];
}

void SparseMatrix::add_block(std::size_t row0, int col0, int nrows, int ncols, const double* block) {
    for (int i = 0; i < nrows; ++i) {
        const auto pos = pattern_->find(row0 + i, col0);
        if (pos < 0 || pattern_->col_idx[pos + ncols - 1] != col0 + ncols - 1) {
            throw InternalError("add_block: block outside the sparsity pattern");
        }
        double* dst = values_.data() + pos;
        const double* src = block + static_cast<std::size_t>(i) * ncols;
        for (int j = 0; j < ncols; ++j) dst[j] += src[j];
    }
}

void SparseMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

void SparseMatrix::scale(double s) {
    for (auto& v : values_) v *= s;
}

void SparseMatrix::add_scaled(double s, const SparseMatrix& other) {
    if (pattern_ != other.pattern_ &&
        (pattern_->row_ptr != other.pattern_->row_ptr || pattern_->col_idx != other.pattern_->col_idx)) {
        throw ConfigError("add_scaled: sparsity patterns differ; use linear_combination");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * other.values_[i];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != cols() || y.size() != rows()) throw ConfigError("multiply: dimension mismatch");
    const auto& rp = pattern_->row_ptr;
    const auto& ci = pattern_->col_idx;
    for (std::size_t r = 0; r < rows(); ++r) {
        double sum = 0.0;
        for (std::size_t p = rp[r]; p < rp[r + 1]; ++p) sum += values_[p] * x[ci[p]];
        y[r] = sum;
    }
}

void SparseMatrix::multiply_add(double s, std::span<const double> x, std::span<double> y) const {
    if (x.size() != cols() || y.size() != rows()) throw ConfigError("multiply_add: dimension mismatch");
    const auto& rp = pattern_->row_ptr;
    const auto& ci = pattern_->col_idx;
    for (std::size_t r = 0; r < rows(); ++r) {
        double sum = 0.0;
        for (std::size_t p = rp[r]; p < rp[r + 1]; ++p) sum += values_[p] * x[ci[p]];
        y[r] += s * sum;
    }
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<Triplet> t;
    t.reserve(nnz());
    const auto& rp = pattern_->row_ptr;
    const auto& ci = pattern_->col_idx;
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t p = rp[r]; p < rp[r + 1]; ++p) {
            t.push_back({ci[p], static_cast<int>(r), values_[p]});
        }
    }
    return from_triplets(cols(), rows(), t);
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
    std::vector<double> y(a.rows());
    a.multiply(x, y);
    return y;
}

SparseMatrix linear_combination(double alpha, const SparseMatrix& a, double beta,
                                const SparseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ConfigError("linear_combination: dimension mismatch");
    }
    if (a.shared_pattern() == b.shared_pattern()) {
        SparseMatrix c = a;
        c.scale(alpha);
        c.add_scaled(beta, b);
        return c;
    }
    std::vector<Triplet> t;
    t.reserve(a.nnz() + b.nnz());
    for (const auto* m : {&a, &b}) {
        const double s = m == &a ? alpha : beta;
        const auto& rp = m->pattern().row_ptr;
        const auto& ci = m->pattern().col_idx;
        const auto vals = m->values();
        for (std::size_t r = 0; r < m->rows(); ++r) {
            for (std::size_t p = rp[r]; p < rp[r + 1]; ++p) {
                t.push_back({static_cast<int>(r), ci[p], s * vals[p]});
            }
        }
    }
    return SparseMatrix::from_triplets(a.rows(), a.cols(), t);
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double bilinear(const SparseMatrix& a, std::span<const double> x, std::span<const double> y) {
    return dot(x, spmv(a, y));
}

void SolverSpec::validate() const {
    if (method == SolverMethod::Iterative) {
        if (!(tolerance > 0.0 && tolerance <= 1e-6)) {
            throw ConfigError("SolverSpec: tolerance must lie in (0, 1e-6]");
        }
        if (max_iter < 1) throw ConfigError("SolverSpec: max_iter must be positive");
    }
    if (block_size < 1) throw ConfigError("SolverSpec: block_size must be positive");
}

namespace {

/// Inverse diagonal blocks of A, applied as z = P^{-1} r.
class BlockJacobi {
    static constexpr int kMaxBlock = 16;

public:
    BlockJacobi(const SparseMatrix& a, int block_size) : bs_(block_size) {
        const std::size_t n = a.rows();
        if (bs_ < 1 || bs_ > kMaxBlock || n % bs_ != 0) bs_ = 1;
        inv_.resize(n * bs_);
        // Fixed-size kernels for the P1..P3 element blocks.
        switch (bs_) {
            case 3: build<3>(a); break;
            case 6: build<6>(a); break;
            case 10: build<10>(a); break;
            default: build<Eigen::Dynamic>(a); break;
        }
    }

    void apply(std::span<const double> r, std::span<double> z) const {
        const std::size_t nb = r.size() / bs_;
        for (std::size_t b = 0; b < nb; ++b) {
            const double* m = inv_.data() + b * bs_ * bs_;
            for (int i = 0; i < bs_; ++i) {
                double s = 0.0;
                for (int j = 0; j < bs_; ++j) s += m[i * bs_ + j] * r[b * bs_ + j];
                z[b * bs_ + i] = s;
            }
        }
    }

private:
    int bs_;
    std::vector<double> inv_;

    template <int N>
    void build(const SparseMatrix& a) {
        using Block = Eigen::Matrix<double, N, N, Eigen::RowMajor, (N > 0 ? N : kMaxBlock),
                                    (N > 0 ? N : kMaxBlock)>;
        const std::size_t nb = a.rows() / bs_;
        const auto& pat = a.pattern();
        const auto vals = a.values();
        Block blk(bs_, bs_);
        for (std::size_t b = 0; b < nb; ++b) {
            const int c0 = static_cast<int>(b * bs_);
            for (int i = 0; i < bs_; ++i) {
                const std::size_t row = b * bs_ + i;
                const auto first = pat.col_idx.begin() + pat.row_ptr[row];
                const auto last = pat.col_idx.begin() + pat.row_ptr[row + 1];
                auto it = std::lower_bound(first, last, c0);
                for (int j = 0; j < bs_; ++j) {
                    // Columns are sorted, so the diagonal block is a run when present.
                    if (it != last && *it == c0 + j) {
                        blk(i, j) = vals[it - pat.col_idx.begin()];
                        ++it;
                    } else {
                        blk(i, j) = 0.0;
                    }
                }
            }
            const Eigen::PartialPivLU<Block> lu(blk);
            const double det = lu.determinant();
            if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
                throw SolverError("block-Jacobi: singular diagonal block", 0.0);
            }
            Eigen::Map<Block>(inv_.data() + b * bs_ * bs_, bs_, bs_) = lu.inverse();
        }
    }
};

double residual_norm(const SparseMatrix& a, std::span<const double> b, std::span<const double> x,
                     std::vector<double>& r) {
    a.multiply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return norm2(r);
}

SolveInfo solve_cg(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                   const SolverSpec& spec, double bnorm) {
    const std::size_t n = b.size();
    BlockJacobi prec(a, spec.block_size);
    std::vector<double> r(n), z(n), p(n), ap(n);
    double rn = residual_norm(a, b, x, r);
    const double target = spec.tolerance * bnorm;
    if (rn <= target) return {0, rn / bnorm};
    prec.apply(r, z);
    p = z;
    double rz = dot(r, z);
    for (int it = 1; it <= spec.max_iter; ++it) {
        a.multiply(p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) throw SolverError("CG breakdown: operator not positive definite", rn / bnorm);
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rn = norm2(r);
        if (rn <= target) return {it, rn / bnorm};
        prec.apply(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw SolverError("CG did not converge in " + std::to_string(spec.max_iter) + " iterations",
                      rn / bnorm);
}

SolveInfo solve_bicgstab(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                         const SolverSpec& spec, double bnorm) {
    const std::size_t n = b.size();
    BlockJacobi prec(a, spec.block_size);
    std::vector<double> r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n), ph(n), sh(n);
    double rn = residual_norm(a, b, x, r);
    const double target = spec.tolerance * bnorm;
    if (rn <= target) return {0, rn / bnorm};
    r0 = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 1; it <= spec.max_iter; ++it) {
        const double rho_new = dot(r0, r);
        if (rho_new == 0.0) throw SolverError("BiCGSTAB breakdown (rho = 0)", rn / bnorm);
        const double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        prec.apply(p, ph);
        a.multiply(ph, v);
        const double r0v = dot(r0, v);
        if (r0v == 0.0) throw SolverError("BiCGSTAB breakdown (r0.v = 0)", rn / bnorm);
        alpha = rho / r0v;
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (norm2(s) <= target) {
            for (std::size_t i = 0; i < n; ++i) x[i] += alpha * ph[i];
            rn = residual_norm(a, b, x, r);
            if (rn <= target) return {it, rn / bnorm};
            continue;
        }
        prec.apply(s, sh);
        a.multiply(sh, t);
        const double tt = dot(t, t);
        if (tt == 0.0) throw SolverError("BiCGSTAB breakdown (t = 0)", rn / bnorm);
        omega = dot(t, s) / tt;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * ph[i] + omega * sh[i];
            r[i] = s[i] - omega * t[i];
        }
        rn = norm2(r);
        if (rn <= target) {
            // Guard against drift of the recursively updated residual.
            rn = residual_norm(a, b, x, r);
            if (rn <= target) return {it, rn / bnorm};
        }
        if (omega == 0.0) throw SolverError("BiCGSTAB breakdown (omega = 0)", rn / bnorm);
    }
    throw SolverError("BiCGSTAB did not converge in " + std::to_string(spec.max_iter) +
                          " iterations",
                      rn / bnorm);
}

SolveInfo solve_direct(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                       double bnorm) {
    const std::size_t n = a.rows();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(a.nnz());
    const auto& rp = a.pattern().row_ptr;
    const auto& ci = a.pattern().col_idx;
    const auto vals = a.values();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t p = rp[r]; p < rp[r + 1]; ++p) {
            if (vals[p] != 0.0) trip.emplace_back(static_cast<int>(r), ci[p], vals[p]);
        }
    }
    Eigen::SparseMatrix<double> m(static_cast<int>(n), static_cast<int>(n));
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU: singular matrix", 1.0);
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd sol = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU: solve failed", 1.0);
    std::copy(sol.data(), sol.data() + n, x.begin());
    std::vector<double> r(n);
    const double rn = residual_norm(a, b, x, r);
    if (!(rn <= 1e-10 * bnorm)) {
        throw SolverError("sparse LU: residual contract violated", rn / bnorm);
    }
    return {1, rn / bnorm};
}

}  // namespace

SolveInfo solve(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                const SolverSpec& spec) {
    spec.validate();
    if (a.rows() != a.cols()) throw ConfigError("solve: matrix is not square");
    if (b.size() != a.rows() || x.size() != a.rows()) throw ConfigError("solve: dimension mismatch");
    for (double v : b) {
        if (!std::isfinite(v)) throw SolverError("solve: non-finite right-hand side", 0.0);
    }
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return {0, 0.0};
    }
    if (spec.method == SolverMethod::Direct) return solve_direct(a, b, x, bnorm);
    return spec.symmetric ? solve_cg(a, b, x, spec, bnorm) : solve_bicgstab(a, b, x, spec, bnorm);
}

std::vector<double> solve(const SparseMatrix& a, std::span<const double> b, const SolverSpec& spec) {
    std::vector<double> x(b.size(), 0.0);
    solve(a, b, x, spec);
    return x;
}

void write_matrix_market(std::ostream& os, const SparseMatrix& a) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
    os.precision(17);
    const auto& rp = a.pattern().row_ptr;
    const auto& ci = a.pattern().col_idx;
    const auto vals = a.values();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t p = rp[r]; p < rp[r + 1]; ++p) {
            os << r + 1 << ' ' << ci[p] + 1 << ' ' << vals[p] << '\n';
        }
    }
}

}  // namespace wdg
