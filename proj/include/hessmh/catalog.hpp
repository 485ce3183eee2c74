#pragma once

#include <string>
#include <vector>

#include "hessmh/measures.hpp"

namespace hmh {

struct ModelFlags {
  /// π_n is Gaussian for every n, so π_n = Λ_n.
  bool gaussian_exact = false;
  /// d_H(π_n, Λ_n) = O(n^{-1/2}) is expected: either U has a unique
  /// nondegenerate minimizer with the tail and prior-integrability conditions,
  /// or U factors through a projection onto the informed subspace with that
  /// restriction well behaved, or π_n is Gaussian.
  bool hellinger_rate = false;
  /// U depends on x only through a projection onto a proper subspace.
  bool informed_subspace = false;
  /// Limit point of the MAP estimates.
  Vec x_star;
  /// Orthonormal basis of the informed subspace (all of R^d when not flagged).
  std::vector<Vec> informed_directions;
};

struct ModelCatalogEntry {
  std::string name;
  std::string description;
  int dim;
  TargetFamily target;
  ModelFlags flags;
  Vec map_start;  // start point for the MAP search
};

/// gauss_ridge, gauss_1d, cubic_1d, cor410_2d, bayes_nonlin_2d, bimodal_1d.
const std::vector<ModelCatalogEntry>& model_catalog();

/// Throws ConfigurationError for an unknown name.
const ModelCatalogEntry& find_model(const std::string& name);

std::vector<std::string> model_names();

/// Normalized log-density of N(0, I_d) with derivatives.
SmoothFunction standard_normal_log_prior(int d);

}  // namespace hmh
