#pragma once

// Index algebra on tensor fields: contraction, the generalized Kronecker
// delta, raising/lowering and (anti)symmetrization.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mag/metric_field.hpp"
#include "mag/tensor_field.hpp"

namespace mag {

/// (up slot, down slot) pair to be traced.
using SlotPair = std::pair<std::size_t, std::size_t>;

/// Trace over each pair; remaining slots keep their relative order.
/// Throws SlotVarianceMismatch or SlotReuse.
TensorField contract(const TensorField& t, std::span<const SlotPair> pairs);
TensorField contract(const TensorField& t, std::initializer_list<SlotPair> pairs);

/// delta^{a_1..a_r}_{b_1..b_r} = det[delta^{a_m}_{b_k}].
double generalized_kronecker(std::span<const std::size_t> upper, std::span<const std::size_t> lower);

/// Which slot of t each index of delta^{a_1..a_r}_{b_1..b_r} is contracted
/// with. An upper index a_m binds a down slot of t, a lower index b_k an up
/// slot. Unbound indices stay free.
struct KroneckerBinding {
  std::vector<std::optional<std::size_t>> upper;
  std::vector<std::optional<std::size_t>> lower;
};

struct GkResult {
  TensorField tensor;
  /// r > n: the delta vanishes identically and `tensor` is zero.
  bool rank_overflow = false;
};

/// Contracts t against delta of rank r. Result slots: unbound slots of t in
/// order, then free upper delta indices, then free lower delta indices.
GkResult gk_apply(std::size_t r, const TensorField& t, const KroneckerBinding& binding);

enum class IndexMove { raise, lower };

/// Flips the variance of one slot by contracting with g or g^{-1}.
TensorField raise_lower(const TensorField& t, std::size_t slot, const MetricField& metric,
                        IndexMove move);

/// 1/2 (t + t with slots a, b swapped); weight 1/2.
TensorField symmetrize(const TensorField& t, std::size_t a, std::size_t b);
/// 1/2 (t - t with slots a, b swapped).
TensorField antisymmetrize(const TensorField& t, std::size_t a, std::size_t b);

}  // namespace mag
