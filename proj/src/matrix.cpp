#include "catagg/matrix.hpp"

#include <cmath>
#include <cstdlib>

namespace catagg {

RationalMatrix RationalMatrix::transpose() const {
    RationalMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("RationalMatrix: dimension mismatch in product");
    RationalMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const Rational& x = at(i, k);
            if (x == 0) continue;
            for (std::size_t j = 0; j < o.cols_; ++j) r.at(i, j) += x * o.at(k, j);
        }
    return r;
}

RationalMatrix RationalMatrix::operator+(const RationalMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("RationalMatrix: dimension mismatch in sum");
    RationalMatrix r(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
}

bool RationalMatrix::operator==(const RationalMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

bool RationalMatrix::is_zero() const {
    for (const auto& x : a_)
        if (x != 0) return false;
    return true;
}

RationalMatrix RationalMatrix::inverse() const {
    if (rows_ != cols_) throw std::invalid_argument("RationalMatrix: inverse of non-square matrix");
    const std::size_t n = rows_;
    RationalMatrix a(*this);
    RationalMatrix inv = identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a.at(piv, col) == 0) ++piv;
        if (piv == n) throw std::domain_error("RationalMatrix: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a.at(piv, j), a.at(col, j));
                std::swap(inv.at(piv, j), inv.at(col, j));
            }
        }
        Rational p = a.at(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a.at(col, j) /= p;
            inv.at(col, j) /= p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col) continue;
            Rational f = a.at(i, col);
            if (f == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a.at(i, j) -= f * a.at(col, j);
                inv.at(i, j) -= f * inv.at(col, j);
            }
        }
    }
    return inv;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("DenseMatrix: dimension mismatch in product");
    DenseMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            double x = at(i, k);
            if (x == 0.0) continue;
            for (std::size_t j = 0; j < o.cols_; ++j) r.at(i, j) += x * o.at(k, j);
        }
    return r;
}

DenseMatrix DenseMatrix::operator+(const DenseMatrix& o) const {
    DenseMatrix r(*this);
    r += o;
    return r;
}

DenseMatrix DenseMatrix::operator-(const DenseMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("DenseMatrix: dimension mismatch in difference");
    DenseMatrix r(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("DenseMatrix: dimension mismatch in sum");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
    for (auto& x : a_) x *= s;
    return *this;
}

double DenseMatrix::max_abs_diff(const DenseMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("DenseMatrix: dimension mismatch in comparison");
    double m = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) m = std::max(m, std::abs(a_[i] - o.a_[i]));
    return m;
}

DenseMatrix to_double(const RationalMatrix& m) {
    DenseMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r.at(i, j) = m.at(i, j).get_d();
    return r;
}

std::string to_fraction_string(const Rational& q) {
    Rational c(q);
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational fraction_from_string(const std::string& s) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad fraction string: " + s);
    q.canonicalize();
    return q;
}

}  // namespace catagg
