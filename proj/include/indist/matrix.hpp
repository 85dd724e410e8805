#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace indist {

/// Small dense real matrix, row major. Everything in this project is real:
/// the beam-splitter convention is the real orthogonal one, so transfer
/// matrices, permanents and amplitudes carry no imaginary parts.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

    Mat operator*(const Mat& rhs) const {
        assert(cols_ == rhs.rows_);
        Mat out(rows_, rhs.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const double v = (*this)(i, k);
                if (v == 0.0) continue;
                for (int j = 0; j < rhs.cols_; ++j) out(i, j) += v * rhs(k, j);
            }
        return out;
    }

    /// Max abs deviation of A^T A from the identity.
    double unitarity_defect() const {
        assert(rows_ == cols_);
        double worst = 0.0;
        for (int i = 0; i < cols_; ++i)
            for (int j = 0; j < cols_; ++j) {
                double dot = 0.0;
                for (int k = 0; k < rows_; ++k) dot += (*this)(k, i) * (*this)(k, j);
                worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
            }
        return worst;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

/// Permanent by Ryser's formula with Gray-code subset updates, O(2^n n).
/// Exact for the block sizes that occur here (n <= 6).
inline double permanent_ryser(const Mat& m) {
    const int n = m.rows();
    assert(n == m.cols());
    if (n == 0) return 1.0;
    // per-row sums over the current column subset S; Gray-code order updates
    // one column per step and the parity of |S| flips with it
    std::vector<double> row_sum(n, 0.0);
    double total = 0.0;
    unsigned gray = 0;
    int sign = (n % 2 == 0) ? 1 : -1;  // carries (-1)^n (-1)^|S|
    const unsigned count = 1u << n;
    for (unsigned i = 1; i < count; ++i) {
        const unsigned next_gray = i ^ (i >> 1);
        const unsigned changed = gray ^ next_gray;
        int bit = 0;
        while (!((changed >> bit) & 1u)) ++bit;
        const double dir = (next_gray & changed) ? 1.0 : -1.0;
        for (int r = 0; r < n; ++r) row_sum[r] += dir * m(r, bit);
        gray = next_gray;
        double prod = 1.0;
        for (int r = 0; r < n; ++r) prod *= row_sum[r];
        sign = -sign;
        total += sign * prod;
    }
    return total;
}

/// Solve A x = b in place by Gaussian elimination with partial pivoting.
/// A is n x n; throws on (numerically) singular systems.
inline std::vector<double> solve_linear(Mat a, std::vector<double> b) {
    const int n = a.rows();
    assert(n == a.cols() && static_cast<int>(b.size()) == n);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (std::abs(a(pivot, col)) < 1e-14) throw std::runtime_error("solve_linear: singular matrix");
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
            std::swap(b[pivot], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < n; ++c) acc -= a(r, c) * x[c];
        x[r] = acc / a(r, r);
    }
    return x;
}

/// Inverse via column-by-column solves; used for fit covariance (n = 5).
inline Mat invert(const Mat& a) {
    const int n = a.rows();
    Mat out(n, n);
    for (int c = 0; c < n; ++c) {
        std::vector<double> e(n, 0.0);
        e[c] = 1.0;
        auto col = solve_linear(a, std::move(e));
        for (int r = 0; r < n; ++r) out(r, c) = col[r];
    }
    return out;
}

}  // namespace indist
