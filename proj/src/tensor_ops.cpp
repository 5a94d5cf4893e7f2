#include "mag/tensor_ops.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "mag/error.hpp"

namespace mag {

TensorField contract(const TensorField& t, std::initializer_list<SlotPair> pairs) {
  return contract(t, std::span<const SlotPair>(pairs.begin(), pairs.size()));
}

TensorField contract(const TensorField& t, std::span<const SlotPair> pairs_in) {
  const std::vector<SlotPair> pairs(pairs_in.begin(), pairs_in.end());
  const std::size_t r = t.rank();
  std::set<std::size_t> used;
  for (const auto& [up, down] : pairs) {
    if (up >= r || down >= r) throw Error(ErrorCode::SlotVarianceMismatch, "slot out of range");
    if (t.variance()[up] != Slot::up || t.variance()[down] != Slot::down) {
      throw Error(ErrorCode::SlotVarianceMismatch, "contraction must pair an up slot with a down slot");
    }
    if (!used.insert(up).second || !used.insert(down).second) {
      throw Error(ErrorCode::SlotReuse, "slot used in more than one contraction");
    }
  }
  std::vector<std::size_t> free_slots;
  Variance v;
  for (std::size_t s = 0; s < r; ++s) {
    if (!used.count(s)) {
      free_slots.push_back(s);
      v.push_back(t.variance()[s]);
    }
  }
  const std::size_t n = t.dim();
  const std::size_t out_size = ipow_size(n, free_slots.size());
  const std::size_t sum_size = ipow_size(n, pairs.size());
  return TensorField::make(
      n, std::move(v), "tr(" + t.label() + ")",
      [t, pairs, free_slots, n, r, out_size, sum_size](auto x) {
        using S = scalar_of<decltype(x)>;
        const std::vector<S> src = t(x);
        std::vector<S> out(out_size, S(0.0));
        std::vector<std::size_t> oidx(free_slots.size()), sidx(pairs.size()), full(r);
        for (std::size_t o = 0; o < out_size; ++o) {
          unflatten(n, o, oidx);
          for (std::size_t k = 0; k < free_slots.size(); ++k) full[free_slots[k]] = oidx[k];
          S acc(0.0);
          for (std::size_t s = 0; s < sum_size; ++s) {
            unflatten(n, s, sidx);
            for (std::size_t p = 0; p < pairs.size(); ++p) {
              full[pairs[p].first] = sidx[p];
              full[pairs[p].second] = sidx[p];
            }
            acc += src[flat_index(n, full)];
          }
          out[o] = acc;
        }
        return out;
      },
      t.frame_id());
}

double generalized_kronecker(std::span<const std::size_t> upper, std::span<const std::size_t> lower) {
  const std::size_t r = upper.size();
  if (lower.size() != r) throw Error(ErrorCode::SlotVarianceMismatch, "delta index groups differ in size");
  // Leibniz expansion over permutations: sum sign(p) prod_m [upper_m == lower_p(m)].
  std::vector<std::size_t> perm(r);
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  do {
    bool hit = true;
    for (std::size_t m = 0; m < r && hit; ++m) hit = upper[m] == lower[perm[m]];
    if (!hit) continue;
    int inversions = 0;
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = a + 1; b < r; ++b) inversions += perm[a] > perm[b] ? 1 : 0;
    total += (inversions % 2 == 0) ? 1.0 : -1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

GkResult gk_apply(std::size_t r, const TensorField& t, const KroneckerBinding& binding) {
  if (binding.upper.size() != r || binding.lower.size() != r) {
    throw Error(ErrorCode::SlotVarianceMismatch, "binding does not match the delta rank");
  }
  const std::size_t tr = t.rank();
  const std::size_t n = t.dim();
  std::set<std::size_t> used;
  for (const auto& b : binding.upper) {
    if (!b) continue;
    if (*b >= tr || t.variance()[*b] != Slot::down) {
      throw Error(ErrorCode::SlotVarianceMismatch, "upper delta index must bind a down slot");
    }
    if (!used.insert(*b).second) throw Error(ErrorCode::SlotReuse, "slot bound twice");
  }
  for (const auto& b : binding.lower) {
    if (!b) continue;
    if (*b >= tr || t.variance()[*b] != Slot::up) {
      throw Error(ErrorCode::SlotVarianceMismatch, "lower delta index must bind an up slot");
    }
    if (!used.insert(*b).second) throw Error(ErrorCode::SlotReuse, "slot bound twice");
  }

  // Result layout: free t slots, free upper delta indices, free lower delta indices.
  std::vector<std::size_t> t_free;
  Variance v;
  for (std::size_t s = 0; s < tr; ++s) {
    if (!used.count(s)) {
      t_free.push_back(s);
      v.push_back(t.variance()[s]);
    }
  }
  std::vector<std::size_t> up_free, lo_free;
  for (std::size_t m = 0; m < r; ++m) {
    if (!binding.upper[m]) {
      up_free.push_back(m);
      v.push_back(Slot::up);
    }
  }
  for (std::size_t m = 0; m < r; ++m) {
    if (!binding.lower[m]) {
      lo_free.push_back(m);
      v.push_back(Slot::down);
    }
  }
  const std::size_t out_rank = v.size();
  const std::size_t bound = used.size();
  if (r > n) {
    return {TensorField::zero(n, std::move(v), "delta(r>n)").on_frame(t.frame_id()), true};
  }

  std::vector<std::size_t> bound_slots(used.begin(), used.end());
  const std::size_t out_size = ipow_size(n, out_rank);
  const std::size_t sum_size = ipow_size(n, bound);
  const KroneckerBinding bind = binding;
  TensorField result = TensorField::make(
      n, std::move(v), "delta.(" + t.label() + ")",
      [t, bind, r, n, tr, t_free, up_free, lo_free, bound_slots, out_rank, out_size, sum_size](
          auto x) {
        using S = scalar_of<decltype(x)>;
        const std::vector<S> src = t(x);
        std::vector<S> out(out_size, S(0.0));
        std::vector<std::size_t> oidx(out_rank), bidx(bound_slots.size()), full(tr);
        std::vector<std::size_t> a(r), b(r);
        for (std::size_t o = 0; o < out_size; ++o) {
          unflatten(n, o, oidx);
          std::size_t k = 0;
          for (std::size_t s : t_free) full[s] = oidx[k++];
          for (std::size_t m : up_free) a[m] = oidx[k++];
          for (std::size_t m : lo_free) b[m] = oidx[k++];
          S acc(0.0);
          for (std::size_t sidx = 0; sidx < sum_size; ++sidx) {
            unflatten(n, sidx, bidx);
            for (std::size_t q = 0; q < bound_slots.size(); ++q) full[bound_slots[q]] = bidx[q];
            for (std::size_t m = 0; m < r; ++m) {
              if (bind.upper[m]) a[m] = full[*bind.upper[m]];
              if (bind.lower[m]) b[m] = full[*bind.lower[m]];
            }
            const double delta = generalized_kronecker(a, b);
            if (delta != 0.0) acc += src[flat_index(n, full)] * delta;
          }
          out[o] = acc;
        }
        return out;
      },
      t.frame_id());
  return {std::move(result), false};
}

TensorField raise_lower(const TensorField& t, std::size_t slot, const MetricField& metric,
                        IndexMove move) {
  if (slot >= t.rank()) throw Error(ErrorCode::SlotVarianceMismatch, "slot out of range");
  if (metric.dim() != t.dim()) throw Error(ErrorCode::InvalidDimension, "metric dimension differs");
  const Slot want = move == IndexMove::lower ? Slot::up : Slot::down;
  if (t.variance()[slot] != want) {
    throw Error(ErrorCode::SlotVarianceMismatch, "slot already has the requested variance");
  }
  Variance v = t.variance();
  v[slot] = move == IndexMove::lower ? Slot::down : Slot::up;
  const TensorField g = move == IndexMove::lower ? metric.g() : metric.inverse();
  const std::size_t n = t.dim();
  const std::size_t r = t.rank();
  return TensorField::make(
      n, std::move(v), t.label(),
      [t, g, slot, n, r](auto x) {
        using S = scalar_of<decltype(x)>;
        const std::vector<S> src = t(x);
        const std::vector<S> gm = g(x);
        std::vector<S> out(src.size(), S(0.0));
        std::vector<std::size_t> idx(r);
        for (std::size_t o = 0; o < src.size(); ++o) {
          unflatten(n, o, idx);
          const std::size_t a = idx[slot];
          S acc(0.0);
          for (std::size_t b = 0; b < n; ++b) {
            idx[slot] = b;
            acc += gm[a * n + b] * src[flat_index(n, idx)];
          }
          out[o] = acc;
        }
        return out;
      },
      t.frame_id());
}

namespace {

TensorField half_swap(const TensorField& t, std::size_t a, std::size_t b, double sign) {
  if (a >= t.rank() || b >= t.rank() || a == b) {
    throw Error(ErrorCode::SlotVarianceMismatch, "bad slot pair");
  }
  if (t.variance()[a] != t.variance()[b]) {
    throw Error(ErrorCode::SlotVarianceMismatch, "(anti)symmetrized slots must share variance");
  }
  const std::size_t n = t.dim();
  const std::size_t r = t.rank();
  TensorField out = TensorField::make(
      n, t.variance(), (sign > 0 ? "sym(" : "alt(") + t.label() + ")",
      [t, a, b, n, r, sign](auto x) {
        using S = scalar_of<decltype(x)>;
        const std::vector<S> src = t(x);
        std::vector<S> out(src.size());
        std::vector<std::size_t> idx(r);
        for (std::size_t o = 0; o < src.size(); ++o) {
          unflatten(n, o, idx);
          std::swap(idx[a], idx[b]);
          out[o] = (src[o] + sign * src[flat_index(n, idx)]) * 0.5;
        }
        return out;
      },
      t.frame_id());
  return out.with_symmetry({a, b, sign < 0});
}

}  // namespace

TensorField symmetrize(const TensorField& t, std::size_t a, std::size_t b) {
  return half_swap(t, a, b, 1.0);
}

TensorField antisymmetrize(const TensorField& t, std::size_t a, std::size_t b) {
  return half_swap(t, a, b, -1.0);
}

}  // namespace mag
