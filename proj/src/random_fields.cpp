#include "mag/random_fields.hpp"

#include <cmath>
#include <random>

namespace mag {

namespace {

struct Component {
  double c0 = 0.0;
  std::vector<double> lin;
  std::vector<double> quad;  // upper triangle, mu <= nu
  double amp = 0.0;
  double damp = 0.0;
  double phase = 0.0;
  std::vector<double> wave;
  double scale = 1.0;
};

std::vector<Component> draw(std::size_t dim, std::size_t count, std::uint64_t seed,
                            double amplitude, bool with_wave) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Component> out(count);
  for (Component& c : out) {
    double norm = 0.0;
    c.c0 = u(rng);
    norm += std::abs(c.c0);
    c.lin.resize(dim);
    for (double& a : c.lin) {
      a = u(rng);
      norm += std::abs(a);
    }
    c.quad.resize(dim * (dim + 1) / 2);
    for (double& a : c.quad) {
      a = u(rng);
      norm += std::abs(a);
    }
    if (with_wave) {
      c.amp = u(rng);
      norm += std::abs(c.amp);
      c.damp = 0.3 + 0.2 * u(rng);
      c.phase = 3.0 * u(rng);
      c.wave.resize(dim);
      for (double& k : c.wave) k = 2.0 * u(rng);
    }
    c.scale = amplitude / norm;
  }
  return out;
}

template <class S>
S eval(const Component& c, std::span<const S> x) {
  using std::exp;
  using std::sin;
  const std::size_t n = x.size();
  S s(c.c0);
  std::size_t q = 0;
  for (std::size_t mu = 0; mu < n; ++mu) {
    s += x[mu] * c.lin[mu];
    for (std::size_t nu = mu; nu < n; ++nu) s += x[mu] * x[nu] * c.quad[q++];
  }
  if (c.amp != 0.0) {
    S r2(0.0), arg(c.phase);
    for (std::size_t mu = 0; mu < n; ++mu) {
      r2 += x[mu] * x[mu];
      arg += x[mu] * c.wave[mu];
    }
    s += exp(r2 * (-c.damp)) * sin(arg) * c.amp;
  }
  return s * c.scale;
}

}  // namespace

Chart unit_box_chart(std::size_t dim, Strategy strategy) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < dim; ++i) names.push_back("x" + std::to_string(i));
  return make_chart(dim, std::move(names), std::vector<Interval>(dim, Interval{-1.0, 1.0}), strategy);
}

TensorField random_tensor(std::size_t dim, Variance variance, std::uint64_t seed, double amplitude,
                          std::string label) {
  const std::size_t count = ipow_size(dim, variance.size());
  auto comps = std::make_shared<const std::vector<Component>>(draw(dim, count, seed, amplitude, true));
  return TensorField::make(dim, std::move(variance), std::move(label), [comps](auto x) {
    using S = scalar_of<decltype(x)>;
    std::vector<S> out(comps->size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = eval<S>((*comps)[i], x);
    return out;
  });
}

MetricField random_metric(std::size_t dim, std::uint64_t seed, double amplitude) {
  const TensorField r = random_tensor(dim, {Slot::down, Slot::down}, seed ^ 0x51ULL, amplitude);
  TensorField g = TensorField::make(dim, {Slot::down, Slot::down}, "g_rand", [r, dim](auto x) {
    using S = scalar_of<decltype(x)>;
    const std::vector<S> p = r(x);
    std::vector<S> g(dim * dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) {
        g[i * dim + j] = (p[i * dim + j] + p[j * dim + i]) * 0.5;
        if (i == j) g[i * dim + j] += (i == 0 ? -1.0 : 1.0);
      }
    return g;
  });
  return MetricField(std::move(g), Signature{static_cast<int>(dim) - 1, 1});
}

ConnectionField random_connection(const Frame& frame, std::uint64_t seed, double amplitude) {
  TensorField c = random_tensor(frame.dim(), {Slot::up, Slot::down, Slot::down}, seed ^ 0xC0ULL,
                                amplitude, "Gamma_rand");
  return make_connection(frame, std::move(c));
}

Frame random_frame(const Chart& chart, std::uint64_t seed, double amplitude) {
  const std::size_t n = chart.dim();
  const TensorField r = random_tensor(n, {Slot::up, Slot::down}, seed ^ 0xF4ULL, amplitude);
  TensorField basis = TensorField::make(n, {Slot::up, Slot::down}, "E_rand", [r, n](auto x) {
    using S = scalar_of<decltype(x)>;
    std::vector<S> e = r(x);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] += 1.0;
    return e;
  });
  return Frame::from_basis(chart, std::move(basis));
}

TensorField random_vector(std::size_t dim, std::uint64_t seed, double amplitude) {
  auto comps = std::make_shared<const std::vector<Component>>(
      draw(dim, dim, seed ^ 0xA5ULL, amplitude, false));
  return TensorField::make(dim, {Slot::up}, "X_rand", [comps](auto x) {
    using S = scalar_of<decltype(x)>;
    std::vector<S> out(comps->size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = eval<S>((*comps)[i], x);
    return out;
  });
}

}  // namespace mag
