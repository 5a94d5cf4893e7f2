#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "mag/dual.hpp"

namespace mag {

enum class Slot : std::uint8_t { up, down };
using Variance = std::vector<Slot>;

/// Scalar type carried by a std::span<const S> argument of a field lambda.
template <class Span>
using scalar_of = std::remove_cv_t<typename std::remove_cvref_t<Span>::element_type>;

/// Optional declared symmetry between two slots.
struct SlotSymmetry {
  std::size_t a = 0;
  std::size_t b = 1;
  bool antisymmetric = false;
};

/// Variance-typed multi-index field over a chart, evaluated pointwise.
///
/// Components are stored row-major with the first slot varying slowest and
/// every slot ranging over the chart dimension. The component callable is
/// instantiated for double and for nested duals up to kMaxDualLevel, so any
/// field can be differentiated analytically.
class TensorField {
 public:
  template <class S>
  using Fn = std::function<std::vector<S>(std::span<const S>)>;

  TensorField() = default;

  /// `g` must be callable as g(std::span<const S>) -> std::vector<S> for
  /// S in {double, D1, D2, D3}.
  template <class G>
  static TensorField make(std::size_t dim, Variance variance, std::string label, G g,
                          std::uint64_t frame_id = 0) {
    auto impl = std::make_shared<Impl>();
    impl->f0 = Fn<double>(g);
    impl->f1 = Fn<D1>(g);
    impl->f2 = Fn<D2>(g);
    impl->f3 = Fn<D3>(std::move(g));
    TensorField t;
    t.dim_ = dim;
    t.variance_ = std::move(variance);
    t.label_ = std::move(label);
    t.frame_id_ = frame_id;
    t.impl_ = std::move(impl);
    return t;
  }

  static TensorField constant(std::size_t dim, Variance variance, std::vector<double> values,
                              std::string label = "const");
  static TensorField zero(std::size_t dim, Variance variance, std::string label = "0");

  template <class S>
  std::vector<S> operator()(std::span<const S> x) const {
    if constexpr (std::is_same_v<S, double>) {
      return impl_->f0(x);
    } else if constexpr (std::is_same_v<S, D1>) {
      return impl_->f1(x);
    } else if constexpr (std::is_same_v<S, D2>) {
      return impl_->f2(x);
    } else {
      static_assert(std::is_same_v<S, D3>, "unsupported scalar level");
      return impl_->f3(x);
    }
  }
  template <class S>
  std::vector<S> operator()(const std::vector<S>& x) const {
    return (*this)(std::span<const S>(x));
  }

  std::vector<double> at(std::span<const double> x) const { return (*this)(x); }

  bool valid() const { return static_cast<bool>(impl_); }
  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return variance_.size(); }
  std::size_t size() const;
  const Variance& variance() const { return variance_; }
  const std::string& label() const { return label_; }
  std::uint64_t frame_id() const { return frame_id_; }
  const std::vector<SlotSymmetry>& symmetries() const { return symmetries_; }

  TensorField relabeled(std::string label) const;
  TensorField on_frame(std::uint64_t frame_id) const;
  TensorField with_symmetry(SlotSymmetry s) const;

 private:
  struct Impl {
    Fn<double> f0;
    Fn<D1> f1;
    Fn<D2> f2;
    Fn<D3> f3;
  };

  std::size_t dim_ = 0;
  Variance variance_;
  std::string label_;
  std::uint64_t frame_id_ = 0;
  std::vector<SlotSymmetry> symmetries_;
  std::shared_ptr<const Impl> impl_;
};

std::size_t ipow_size(std::size_t n, std::size_t k);

/// Row-major flat offset of a multi-index.
inline std::size_t flat_index(std::size_t n, std::span<const std::size_t> idx) {
  std::size_t off = 0;
  for (std::size_t i : idx) off = off * n + i;
  return off;
}
inline std::size_t flat_index(std::size_t n, std::initializer_list<std::size_t> idx) {
  std::size_t off = 0;
  for (std::size_t i : idx) off = off * n + i;
  return off;
}

/// Decomposes a flat offset into its multi-index.
void unflatten(std::size_t n, std::size_t offset, std::span<std::size_t> idx);

// ---- pointwise linear algebra on fields -----------------------------------

TensorField add(const TensorField& a, const TensorField& b);
TensorField subtract(const TensorField& a, const TensorField& b);
TensorField scale(const TensorField& a, double s);
TensorField linear_combination(double ca, const TensorField& a, double cb, const TensorField& b);
TensorField tensor_product(const TensorField& a, const TensorField& b);

/// Reorders slots: result slot k is source slot perm[k].
TensorField permute_slots(const TensorField& t, std::vector<std::size_t> perm);

/// Largest |component| over the given points.
double max_abs(const TensorField& t, std::span<const std::vector<double>> points);

/// Largest |declared-symmetry violation| over the points.
double symmetry_violation(const TensorField& t, std::span<const std::vector<double>> points);

}  // namespace mag
