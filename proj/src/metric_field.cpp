#include "mag/metric_field.hpp"

#include <cmath>

#include "mag/error.hpp"
#include "mag/linalg.hpp"

namespace mag {

MetricField::MetricField(TensorField g, Signature signature)
    : g_(std::move(g)), signature_(signature) {
  if (g_.rank() != 2 || g_.variance()[0] != Slot::down || g_.variance()[1] != Slot::down) {
    throw Error(ErrorCode::SlotVarianceMismatch, "metric must be a rank-(0,2) field");
  }
  if (signature.positive + signature.negative != static_cast<int>(g_.dim())) {
    throw Error(ErrorCode::InvalidDimension, "signature does not match the metric dimension");
  }
  const std::size_t n = g_.dim();
  const TensorField g0 = g_;
  inverse_ = TensorField::make(
                 n, {Slot::up, Slot::up}, g_.label() + "^-1",
                 [g0, n](auto x) {
                   using S = scalar_of<decltype(x)>;
                   return mag::inverse<S>(g0(x), n);
                 },
                 g_.frame_id())
                 .with_symmetry({0, 1, false});
  det_ = TensorField::make(
      n, {}, "det " + g_.label(),
      [g0, n](auto x) {
        using S = scalar_of<decltype(x)>;
        return std::vector<S>{mag::determinant<S>(g0(x), n)};
      },
      g_.frame_id());
  volume_ = TensorField::make(
      n, {}, "sqrt|det " + g_.label() + "|",
      [g0, n](auto x) {
        using S = scalar_of<decltype(x)>;
        using std::sqrt;
        S d = mag::determinant<S>(g0(x), n);
        if (value_of(d) < 0.0) d = -d;
        return std::vector<S>{sqrt(d)};
      },
      g_.frame_id());
  g_ = g_.with_symmetry({0, 1, false});
}

}  // namespace mag
