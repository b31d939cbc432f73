#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "caerl/errors.hpp"

namespace caerl {

/// Dense n-dimensional array of 64-bit reals, row-major.
///
/// Shape metadata is dynamic; product(shape) == data.size() always holds.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    data.assign(numel_of(shape), 0.0);
  }

  Tensor(std::vector<std::size_t> s, std::vector<double> d)
      : shape(std::move(s)), data(std::move(d)) {
    if (numel_of(shape) != data.size())
      throw dim_error("Tensor: shape/product mismatch (" + shape_str() + " vs " +
                      std::to_string(data.size()) + " values)");
  }

  static std::size_t numel_of(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
  }

  static Tensor zeros(std::vector<std::size_t> s) { return Tensor(std::move(s)); }

  static Tensor full(std::vector<std::size_t> s, double v) {
    Tensor t(std::move(s));
    for (double& x : t.data) x = v;
    return t;
  }

  /// 1-D tensor from a value list.
  static Tensor vec(std::vector<double> v) {
    std::vector<std::size_t> s{v.size()};
    return Tensor(std::move(s), std::move(v));
  }

  /// 2-D tensor from nested lists (rows must be equal length).
  static Tensor mat(std::initializer_list<std::initializer_list<double>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r ? rows.begin()->size() : 0;
    Tensor t({r, c});
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw dim_error("Tensor::mat: ragged rows");
      for (double v : row) t.data[i++] = v;
    }
    return t;
  }

  std::size_t numel() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t size(std::size_t axis) const { return shape.at(axis); }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  double& at(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }

  double& at(std::size_t i, std::size_t j, std::size_t k) {
    return data[(i * shape[1] + j) * shape[2] + k];
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return data[(i * shape[1] + j) * shape[2] + k];
  }

  /// Row view copy of a 2-D tensor.
  Tensor row(std::size_t i) const {
    Tensor r({shape[1]});
    for (std::size_t j = 0; j < shape[1]; ++j) r[j] = at(i, j);
    return r;
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  bool finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  std::string shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i)
      os << shape[i] << (i + 1 < shape.size() ? "x" : "");
    os << "]";
    return os.str();
  }
};

/// Flatten a list of row vectors into one long vector (feature concatenation).
inline Tensor concat(const std::vector<Tensor>& parts) {
  std::size_t n = 0;
  for (const auto& p : parts) n += p.numel();
  Tensor out({n});
  std::size_t i = 0;
  for (const auto& p : parts)
    for (double v : p.data) out[i++] = v;
  return out;
}

inline void require_shape(const Tensor& t, const std::vector<std::size_t>& s,
                          const std::string& what) {
  if (t.shape != s) {
    Tensor want(s);
    throw dim_error(what + ": expected shape " + want.shape_str() + ", got " +
                    t.shape_str());
  }
}

}  // namespace caerl
