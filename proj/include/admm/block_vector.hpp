#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace admm {

// A point in R^n partitioned into B blocks. Storage is a single flat vector,
// so flat arithmetic and blockwise arithmetic agree by construction; blocks
// are exposed as segment views.
class BlockVector {
 public:
  BlockVector() = default;

  explicit BlockVector(std::vector<int> dims)
      : dims_(std::move(dims)), offsets_(make_offsets(dims_)), data_(Eigen::VectorXd::Zero(total(dims_))) {}

  BlockVector(std::vector<int> dims, Eigen::VectorXd flat)
      : dims_(std::move(dims)), offsets_(make_offsets(dims_)), data_(std::move(flat)) {
    if (data_.size() != total(dims_)) throw std::invalid_argument("BlockVector: flat size does not match dims");
  }

  int blocks() const { return static_cast<int>(dims_.size()); }
  int dim() const { return static_cast<int>(data_.size()); }
  int block_dim(int t) const { return dims_[t]; }
  int block_offset(int t) const { return offsets_[t]; }
  const std::vector<int>& dims() const { return dims_; }

  Eigen::VectorBlock<Eigen::VectorXd> block(int t) { return data_.segment(offsets_[t], dims_[t]); }
  Eigen::VectorBlock<const Eigen::VectorXd> block(int t) const { return data_.segment(offsets_[t], dims_[t]); }

  Eigen::VectorXd& flat() { return data_; }
  const Eigen::VectorXd& flat() const { return data_; }

  double norm() const { return data_.norm(); }
  double squared_norm() const { return data_.squaredNorm(); }
  double dot(const BlockVector& other) const { return data_.dot(other.data_); }

  BlockVector& operator+=(const BlockVector& other) {
    data_ += other.data_;
    return *this;
  }
  BlockVector& operator-=(const BlockVector& other) {
    data_ -= other.data_;
    return *this;
  }
  BlockVector& operator*=(double s) {
    data_ *= s;
    return *this;
  }

  friend BlockVector operator+(BlockVector a, const BlockVector& b) { return a += b; }
  friend BlockVector operator-(BlockVector a, const BlockVector& b) { return a -= b; }
  friend BlockVector operator*(double s, BlockVector a) { return a *= s; }

  bool same_shape(const BlockVector& other) const { return dims_ == other.dims_; }

 private:
  static std::vector<int> make_offsets(const std::vector<int>& dims) {
    std::vector<int> off(dims.size());
    int acc = 0;
    for (std::size_t t = 0; t < dims.size(); ++t) {
      if (dims[t] <= 0) throw std::invalid_argument("BlockVector: block dims must be positive");
      off[t] = acc;
      acc += dims[t];
    }
    return off;
  }
  static int total(const std::vector<int>& dims) {
    int acc = 0;
    for (int d : dims) acc += d;
    return acc;
  }

  std::vector<int> dims_;
  std::vector<int> offsets_;
  Eigen::VectorXd data_;
};

}  // namespace admm
