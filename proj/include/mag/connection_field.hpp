#pragma once

#include <optional>
#include <string>

#include "mag/chart_frame.hpp"
#include "mag/tensor_field.hpp"

namespace mag {

/// Linear connection given by its coefficients in a frame.
///
/// Index convention: Gamma^k_{ij} is stored with slots [up k, down i, down j],
/// where i is the differentiation direction: nabla_{e_i} e_j = Gamma^k_{ij} e_k.
struct ConnectionField {
  Frame frame;
  TensorField coefficients;
  std::optional<std::string> levi_civita_of;
  bool u_invariant = false;

  std::size_t dim() const { return frame.dim(); }
  const std::string& label() const { return coefficients.label(); }
};

/// Validates the [up, down, down] shape and tags the field with the frame.
ConnectionField make_connection(Frame frame, TensorField coefficients);

/// N^i_{jk} = Gamma^i_{jk} - hatGamma^i_{jk}, with the pair it separates.
struct DisplacementField {
  TensorField n;
  ConnectionField connection;
  ConnectionField levi_civita;
};

}  // namespace mag
