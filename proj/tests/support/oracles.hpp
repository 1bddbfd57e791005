#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "oeecast/tda.hpp"

namespace oracle {

using Points = std::vector<std::vector<double>>;

Points random_cloud(std::size_t n, std::size_t dim, std::mt19937_64& rng);

/// Vietoris-Rips persistence (H0 and H1) by reducing the full boundary matrix
/// of every vertex, edge and triangle. H0 keeps one pair per point with the
/// essential class dying at the largest distance; H1 keeps pairs with
/// positive lifetime.
std::vector<oeecast::tda::PersistencePair> boundary_matrix_persistence(const Points& pts);

/// Edge weights of a minimum spanning tree (Prim), sorted.
std::vector<double> mst_weights(const Points& pts);

/// Pairs sorted by (dim, birth, death); equal when every entry agrees to tol.
bool same_pairs(std::vector<oeecast::tda::PersistencePair> a, std::vector<oeecast::tda::PersistencePair> b,
                double tol = 1e-12);

oeecast::tda::PersistenceDiagram random_diagram(std::size_t pairs, int dim, std::mt19937_64& rng);

/// Number of pairs of dimension `dim` with birth <= t < death.
int count_alive(const oeecast::tda::PersistenceDiagram& d, int dim, double t);

/// Sample entropy by explicit template enumeration: B counts pairs of
/// length-m templates among the first n-m start positions within r
/// (Chebyshev), A the same pairs that also match at length m+1.
double sample_entropy_by_templates(std::span<const double> x, int m, double r);

/// Horizon-step mean forecast of a seasonal AR model
/// (1 - phi B)(1 - Phi B^s)(y_t - mu) = eps_t from observed history.
std::vector<double> sar_forecast(std::span<const double> y, double mu, double phi, double seasonal_phi, int s,
                                 std::size_t horizon);

/// Trapezoidal integral of f over [a, b] with n panels.
template <class F>
double trapezoid(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) acc += f(a + i * h);
  return acc * h;
}

}  // namespace oracle
