#include "mag/tensor_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mag/error.hpp"

namespace mag {

std::size_t ipow_size(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < k; ++i) r *= n;
  return r;
}

void unflatten(std::size_t n, std::size_t offset, std::span<std::size_t> idx) {
  for (std::size_t k = idx.size(); k-- > 0;) {
    idx[k] = offset % n;
    offset /= n;
  }
}

std::size_t TensorField::size() const { return ipow_size(dim_, variance_.size()); }

TensorField TensorField::constant(std::size_t dim, Variance variance, std::vector<double> values,
                                  std::string label) {
  if (values.size() != ipow_size(dim, variance.size())) {
    throw std::invalid_argument("constant tensor: component count does not match shape");
  }
  return make(dim, std::move(variance), std::move(label), [values](auto x) {
    using S = scalar_of<decltype(x)>;
    return std::vector<S>(values.begin(), values.end());
  });
}

TensorField TensorField::zero(std::size_t dim, Variance variance, std::string label) {
  const std::size_t count = ipow_size(dim, variance.size());
  return make(dim, std::move(variance), std::move(label), [count](auto x) {
    using S = scalar_of<decltype(x)>;
    return std::vector<S>(count, S(0.0));
  });
}

TensorField TensorField::relabeled(std::string label) const {
  TensorField t = *this;
  t.label_ = std::move(label);
  return t;
}

TensorField TensorField::on_frame(std::uint64_t frame_id) const {
  TensorField t = *this;
  t.frame_id_ = frame_id;
  return t;
}

TensorField TensorField::with_symmetry(SlotSymmetry s) const {
  TensorField t = *this;
  t.symmetries_.push_back(s);
  return t;
}

namespace {

void require_same_shape(const TensorField& a, const TensorField& b) {
  if (a.dim() != b.dim() || a.variance() != b.variance()) {
    throw Error(ErrorCode::SlotVarianceMismatch, "fields '" + a.label() + "' and '" + b.label() +
                                                     "' have different shapes");
  }
}

std::uint64_t shared_frame(const TensorField& a, const TensorField& b) {
  if (a.frame_id() != 0 && b.frame_id() != 0 && a.frame_id() != b.frame_id()) {
    throw Error(ErrorCode::FrameMismatch, "fields '" + a.label() + "' and '" + b.label() +
                                              "' live on different frames");
  }
  return a.frame_id() != 0 ? a.frame_id() : b.frame_id();
}

}  // namespace

TensorField linear_combination(double ca, const TensorField& a, double cb, const TensorField& b) {
  require_same_shape(a, b);
  return TensorField::make(
      a.dim(), a.variance(), a.label() + "+" + b.label(),
      [ca, a, cb, b](auto x) {
        auto va = a(x);
        const auto vb = b(x);
        for (std::size_t i = 0; i < va.size(); ++i) va[i] = va[i] * ca + vb[i] * cb;
        return va;
      },
      shared_frame(a, b));
}

TensorField add(const TensorField& a, const TensorField& b) {
  return linear_combination(1.0, a, 1.0, b);
}

TensorField subtract(const TensorField& a, const TensorField& b) {
  return linear_combination(1.0, a, -1.0, b).relabeled(a.label() + "-" + b.label());
}

TensorField scale(const TensorField& a, double s) {
  return TensorField::make(
      a.dim(), a.variance(), a.label(),
      [a, s](auto x) {
        auto v = a(x);
        for (auto& c : v) c = c * s;
        return v;
      },
      a.frame_id());
}

TensorField tensor_product(const TensorField& a, const TensorField& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::InvalidDimension, "tensor product dims differ");
  Variance v = a.variance();
  v.insert(v.end(), b.variance().begin(), b.variance().end());
  return TensorField::make(
      a.dim(), std::move(v), a.label() + "(x)" + b.label(),
      [a, b](auto x) {
        using S = scalar_of<decltype(x)>;
        const auto va = a(x);
        const auto vb = b(x);
        std::vector<S> out(va.size() * vb.size());
        for (std::size_t i = 0; i < va.size(); ++i)
          for (std::size_t j = 0; j < vb.size(); ++j) out[i * vb.size() + j] = va[i] * vb[j];
        return out;
      },
      shared_frame(a, b));
}

TensorField permute_slots(const TensorField& t, std::vector<std::size_t> perm) {
  const std::size_t r = t.rank();
  if (perm.size() != r) throw std::invalid_argument("permute_slots: wrong permutation length");
  Variance v(r);
  for (std::size_t k = 0; k < r; ++k) v[k] = t.variance().at(perm[k]);
  const std::size_t n = t.dim();
  return TensorField::make(
      n, std::move(v), t.label(),
      [t, perm, n, r](auto x) {
        using S = scalar_of<decltype(x)>;
        const auto src = t(x);
        std::vector<S> out(src.size());
        std::vector<std::size_t> idx(r), sidx(r);
        for (std::size_t off = 0; off < src.size(); ++off) {
          unflatten(n, off, idx);
          for (std::size_t k = 0; k < r; ++k) sidx[perm[k]] = idx[k];
          out[off] = src[flat_index(n, sidx)];
        }
        return out;
      },
      t.frame_id());
}

double max_abs(const TensorField& t, std::span<const std::vector<double>> points) {
  double m = 0.0;
  for (const auto& p : points) {
    for (double c : t.at(p)) m = std::max(m, std::abs(c));
  }
  return m;
}

double symmetry_violation(const TensorField& t, std::span<const std::vector<double>> points) {
  const std::size_t n = t.dim();
  const std::size_t r = t.rank();
  double worst = 0.0;
  std::vector<std::size_t> idx(r);
  for (const auto& p : points) {
    const auto v = t.at(p);
    for (const SlotSymmetry& s : t.symmetries()) {
      for (std::size_t off = 0; off < v.size(); ++off) {
        unflatten(n, off, idx);
        std::swap(idx[s.a], idx[s.b]);
        const double other = v[flat_index(n, idx)];
        const double viol = s.antisymmetric ? v[off] + other : v[off] - other;
        worst = std::max(worst, std::abs(viol));
      }
    }
  }
  return worst;
}

}  // namespace mag
