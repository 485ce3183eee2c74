#include "hessmh/catalog.hpp"

#include <cmath>

namespace hmh {

SmoothFunction standard_normal_log_prior(int d) {
  const double c = -0.5 * d * std::log(2.0 * M_PI);
  return SmoothFunction::analytic([c](const Vec& x) { return c - 0.5 * x.squaredNorm(); },
                                  [](const Vec& x) { return Vec(-x); },
                                  [d](const Vec&) { return Mat(-Mat::Identity(d, d)); });
}

namespace {

std::vector<Vec> unit_basis(int d) {
  std::vector<Vec> out;
  for (int i = 0; i < d; ++i) out.push_back(Vec::Unit(d, i));
  return out;
}

ModelCatalogEntry gauss_ridge() {
  ModelCatalogEntry e;
  e.name = "gauss_ridge";
  e.description = "U = x2^2/2 with N(0, I2) prior; C_n = diag(1, 1/(1+n))";
  e.dim = 2;
  e.target.dim = 2;
  e.target.potential = SmoothFunction::analytic(
      [](const Vec& x) { return 0.5 * x[1] * x[1]; },
      [](const Vec& x) { return Vec{{0.0, x[1]}}; },
      [](const Vec&) { return Mat{{0.0, 0.0}, {0.0, 1.0}}; });
  e.target.log_prior = standard_normal_log_prior(2);
  e.flags.gaussian_exact = true;
  e.flags.hellinger_rate = true;
  e.flags.informed_subspace = true;
  e.flags.x_star = Vec::Zero(2);
  e.flags.informed_directions = {Vec::Unit(2, 1)};
  e.map_start = Vec::Zero(2);
  return e;
}

ModelCatalogEntry gauss_1d() {
  ModelCatalogEntry e;
  e.name = "gauss_1d";
  e.description = "U = x^2/2 with N(0, 1) prior; π_n = N(0, 1/(n+1))";
  e.dim = 1;
  e.target.dim = 1;
  e.target.potential = SmoothFunction::analytic(
      [](const Vec& x) { return 0.5 * x[0] * x[0]; }, [](const Vec& x) { return Vec(x); },
      [](const Vec&) { return Mat::Identity(1, 1); });
  e.target.log_prior = standard_normal_log_prior(1);
  e.flags.gaussian_exact = true;
  e.flags.hellinger_rate = true;
  e.flags.x_star = Vec::Zero(1);
  e.flags.informed_directions = unit_basis(1);
  e.map_start = Vec::Zero(1);
  return e;
}

ModelCatalogEntry cubic_1d() {
  ModelCatalogEntry e;
  e.name = "cubic_1d";
  e.description = "U = (x + x^3/3)^2/2 with N(0, 1) prior";
  e.dim = 1;
  e.target.dim = 1;
  e.target.potential = SmoothFunction::analytic(
      [](const Vec& x) {
        const double g = x[0] + x[0] * x[0] * x[0] / 3.0;
        return 0.5 * g * g;
      },
      [](const Vec& x) {
        const double t = x[0];
        const double g = t + t * t * t / 3.0, dg = 1.0 + t * t;
        return Vec::Constant(1, g * dg);
      },
      [](const Vec& x) {
        const double t = x[0];
        const double g = t + t * t * t / 3.0, dg = 1.0 + t * t, d2g = 2.0 * t;
        return Mat::Constant(1, 1, dg * dg + g * d2g);
      });
  e.target.log_prior = standard_normal_log_prior(1);
  e.flags.hellinger_rate = true;
  e.flags.x_star = Vec::Zero(1);
  e.flags.informed_directions = unit_basis(1);
  e.map_start = Vec::Constant(1, 1.0);
  return e;
}

// U = g(x2)^2/2 with g(t) = t + t^2/2 + t^3/6, strictly increasing.
ModelCatalogEntry cor410_2d() {
  ModelCatalogEntry e;
  e.name = "cor410_2d";
  e.description =
      "U = g(x2)^2/2, g(t) = t + t^2/2 + t^3/6, N(0, I2) prior; concentrates on x2 = 0";
  e.dim = 2;
  e.target.dim = 2;
  e.target.potential = SmoothFunction::analytic(
      [](const Vec& x) {
        const double t = x[1];
        const double g = t + t * t / 2.0 + t * t * t / 6.0;
        return 0.5 * g * g;
      },
      [](const Vec& x) {
        const double t = x[1];
        const double g = t + t * t / 2.0 + t * t * t / 6.0, dg = 1.0 + t + t * t / 2.0;
        return Vec{{0.0, g * dg}};
      },
      [](const Vec& x) {
        const double t = x[1];
        const double g = t + t * t / 2.0 + t * t * t / 6.0, dg = 1.0 + t + t * t / 2.0;
        const double d2g = 1.0 + t;
        return Mat{{0.0, 0.0}, {0.0, dg * dg + g * d2g}};
      });
  e.target.log_prior = standard_normal_log_prior(2);
  e.flags.hellinger_rate = true;
  e.flags.informed_subspace = true;
  e.flags.x_star = Vec::Zero(2);
  e.flags.informed_directions = {Vec::Unit(2, 1)};
  e.map_start = Vec{{0.5, 0.5}};
  return e;
}

// U = ||y − F(x)||^2/2, F(x) = (x1 + x2^2/2, x2 + x2^3/10), y = F(x*).
ModelCatalogEntry bayes_nonlin_2d() {
  ModelCatalogEntry e;
  e.name = "bayes_nonlin_2d";
  e.description = "U = |y - F(x)|^2/2, F(x) = (x1 + x2^2/2, x2 + x2^3/10), y = F(0.5, -0.3)";
  e.dim = 2;
  e.target.dim = 2;
  const auto F = [](const Vec& x) {
    return Vec{{x[0] + 0.5 * x[1] * x[1], x[1] + 0.1 * x[1] * x[1] * x[1]}};
  };
  const Vec x_star{{0.5, -0.3}};
  const Vec y = F(x_star);
  e.target.potential = SmoothFunction::analytic(
      [F, y](const Vec& x) { return 0.5 * (y - F(x)).squaredNorm(); },
      [F, y](const Vec& x) {
        const Vec r = y - F(x);
        const Mat J{{1.0, x[1]}, {0.0, 1.0 + 0.3 * x[1] * x[1]}};
        return Vec(-J.transpose() * r);
      },
      [F, y](const Vec& x) {
        const Vec r = y - F(x);
        const Mat J{{1.0, x[1]}, {0.0, 1.0 + 0.3 * x[1] * x[1]}};
        Mat h = J.transpose() * J;
        h(1, 1) -= r[0] * 1.0 + r[1] * 0.6 * x[1];
        return h;
      });
  e.target.log_prior = standard_normal_log_prior(2);
  e.flags.hellinger_rate = true;
  e.flags.x_star = x_star;
  e.flags.informed_directions = unit_basis(2);
  e.map_start = x_star;
  return e;
}

// Two global minimizers at ±1, so no single Laplace approximation captures π_n.
ModelCatalogEntry bimodal_1d() {
  ModelCatalogEntry e;
  e.name = "bimodal_1d";
  e.description = "U = (x^2 - 1)^2/2 with N(0, 1) prior; modes at -1 and 1";
  e.dim = 1;
  e.target.dim = 1;
  e.target.potential = SmoothFunction::analytic(
      [](const Vec& x) {
        const double g = x[0] * x[0] - 1.0;
        return 0.5 * g * g;
      },
      [](const Vec& x) { return Vec::Constant(1, 2.0 * x[0] * (x[0] * x[0] - 1.0)); },
      [](const Vec& x) { return Mat::Constant(1, 1, 6.0 * x[0] * x[0] - 2.0); });
  e.target.log_prior = standard_normal_log_prior(1);
  e.flags.x_star = Vec::Constant(1, 1.0);  // the mode reached from map_start
  e.flags.informed_directions = unit_basis(1);
  e.map_start = Vec::Constant(1, 0.8);
  return e;
}

}  // namespace

const std::vector<ModelCatalogEntry>& model_catalog() {
  static const std::vector<ModelCatalogEntry> catalog = {
      gauss_ridge(), gauss_1d(), cubic_1d(), cor410_2d(), bayes_nonlin_2d(), bimodal_1d()};
  return catalog;
}

const ModelCatalogEntry& find_model(const std::string& name) {
  for (const auto& e : model_catalog()) {
    if (e.name == name) return e;
  }
  throw ConfigurationError("unknown model '" + name + "'");
}

std::vector<std::string> model_names() {
  std::vector<std::string> out;
  for (const auto& e : model_catalog()) out.push_back(e.name);
  return out;
}

}  // namespace hmh
