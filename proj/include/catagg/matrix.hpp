#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace catagg {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Dense matrix over exact rationals. All arithmetic is exact.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static RationalMatrix identity(std::size_t n) {
        RationalMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Rational& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    RationalMatrix transpose() const;
    RationalMatrix operator*(const RationalMatrix& o) const;
    RationalMatrix operator+(const RationalMatrix& o) const;
    bool operator==(const RationalMatrix& o) const;
    bool operator!=(const RationalMatrix& o) const { return !(*this == o); }

    /// Exact Gauss-Jordan inverse. Throws std::domain_error if singular.
    RationalMatrix inverse() const;

    bool is_zero() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> a_;
};

/// Dense float64 matrix for the learning path.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    std::vector<double>& data() { return a_; }
    const std::vector<double>& data() const { return a_; }

    DenseMatrix transpose() const;
    DenseMatrix operator*(const DenseMatrix& o) const;
    DenseMatrix operator+(const DenseMatrix& o) const;
    DenseMatrix operator-(const DenseMatrix& o) const;
    DenseMatrix& operator+=(const DenseMatrix& o);
    DenseMatrix& operator*=(double s);

    double max_abs_diff(const DenseMatrix& o) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

DenseMatrix to_double(const RationalMatrix& m);

/// "num/den" in lowest terms, "num" when den = 1.
std::string to_fraction_string(const Rational& q);
Rational fraction_from_string(const std::string& s);

}  // namespace catagg
