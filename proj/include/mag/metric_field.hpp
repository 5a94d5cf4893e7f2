#pragma once

#include <string>

#include "mag/tensor_field.hpp"

namespace mag {
/// Eigenvalue sign count (positive, negative); (3,1) is
/// Eigenvalue sign count (positive, negative); the paper-style (3,1) is
/// spacetime with one timelike direction.
struct Signature {
  int positive = 0;
  int negative = 0;
  bool operator==(const Signature&) const = default;
};

/// Symmetric rank-(0,2) field g_ij given in the components of some frame,
/// with derived inverse, determinant and volume density.
class MetricField {
 public:
  MetricField() = default;
  MetricField(TensorField g, Signature signature);

  const TensorField& g() const { return g_; }
  const TensorField& inverse() const { return inverse_; }
  const TensorField& determinant() const { return det_; }
  /// sqrt|det g|.
  const TensorField& volume_density() const { return volume_; }
  Signature signature() const { return signature_; }
  std::size_t dim() const { return g_.dim(); }
  const std::string& label() const { return g_.label(); }
  std::uint64_t frame_id() const { return g_.frame_id(); }

 private:
  TensorField g_;
  TensorField inverse_;
  TensorField det_;
  TensorField volume_;
  Signature signature_;
};

}  // namespace mag
