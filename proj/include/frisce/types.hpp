#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace frisce {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;   // column-major, as everywhere in this library
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape mismatch between operands; message names both shapes.
struct DimensionError : Error {
    using Error::Error;
};

// Invalid scenario or experiment configuration (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

// A column (or whole operand) with no usable energy was handed to a
// rank-1 factorization step.
struct DegenerateColumnError : Error {
    using Error::Error;
};

// An iterative kernel hit its sweep cap before reaching tolerance.
struct ConvergenceError : Error {
    using Error::Error;
};

inline std::string shape_str(Index rows, Index cols) {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

// Dense order-3 complex tensor. Linear layout: index(i1,i2,i3) = i1 + d1*(i2 + d2*i3),
// zero-based, so the mode-1 unfolding is a plain column-major reshape.
class Tensor3 {
  public:
    Tensor3() : d1_(0), d2_(0), d3_(0) {}
    Tensor3(Index d1, Index d2, Index d3)
        : d1_(d1), d2_(d2), d3_(d3), data_(CVector::Zero(d1 * d2 * d3)) {}

    Index d1() const { return d1_; }
    Index d2() const { return d2_; }
    Index d3() const { return d3_; }
    Index size() const { return data_.size(); }

    Complex& operator()(Index i1, Index i2, Index i3) {
        return data_[i1 + d1_ * (i2 + d2_ * i3)];
    }
    Complex operator()(Index i1, Index i2, Index i3) const {
        return data_[i1 + d1_ * (i2 + d2_ * i3)];
    }

    CVector& data() { return data_; }
    const CVector& data() const { return data_; }

    double norm() const { return data_.norm(); }

  private:
    Index d1_, d2_, d3_;
    CVector data_;
};

// Dense order-4 complex tensor, index(i1,i2,i3,i4) = i1 + d1*(i2 + d2*(i3 + d3*i4)).
// The (i3,i4) slice is a contiguous d1 x d2 block.
class Tensor4 {
  public:
    Tensor4() : d1_(0), d2_(0), d3_(0), d4_(0) {}
    Tensor4(Index d1, Index d2, Index d3, Index d4)
        : d1_(d1), d2_(d2), d3_(d3), d4_(d4), data_(CVector::Zero(d1 * d2 * d3 * d4)) {}

    Index d1() const { return d1_; }
    Index d2() const { return d2_; }
    Index d3() const { return d3_; }
    Index d4() const { return d4_; }
    Index size() const { return data_.size(); }

    Complex& operator()(Index i1, Index i2, Index i3, Index i4) {
        return data_[i1 + d1_ * (i2 + d2_ * (i3 + d3_ * i4))];
    }
    Complex operator()(Index i1, Index i2, Index i3, Index i4) const {
        return data_[i1 + d1_ * (i2 + d2_ * (i3 + d3_ * i4))];
    }

    Eigen::Map<CMatrix> slice(Index i3, Index i4) {
        return {data_.data() + d1_ * d2_ * (i3 + d3_ * i4), d1_, d2_};
    }
    Eigen::Map<const CMatrix> slice(Index i3, Index i4) const {
        return {data_.data() + d1_ * d2_ * (i3 + d3_ * i4), d1_, d2_};
    }

    CVector& data() { return data_; }
    const CVector& data() const { return data_; }

    double norm() const { return data_.norm(); }

  private:
    Index d1_, d2_, d3_, d4_;
    CVector data_;
};

}  // namespace frisce
