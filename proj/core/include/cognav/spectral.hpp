#pragma once

#include <cstdint>
#include <vector>

namespace cognav {

// Dense symmetric matrices are stored row-major as n*n doubles.

struct EigenSystem {
  // Ascending eigenvalues with matching orthonormal eigenvectors;
  // vectors[i] belongs to values[i].
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};

// Cyclic Jacobi diagonalization. Sweeps until the off-diagonal Frobenius norm
// drops below `tol` or `max_sweeps` full sweeps have run. Each eigenvector has
// unit norm and a non-negative first non-zero component, which pins the sign.
EigenSystem jacobi_eigensystem(const std::vector<double>& sym, int n, double tol = 1e-10,
                               int max_sweeps = 100);

// Seeded k-means++ on row vectors; returns the labeling with the lowest
// within-cluster sum of squares over `restarts` runs. Empty clusters are
// repaired by stealing the point farthest from its centroid.
std::vector<int> kmeans(const std::vector<std::vector<double>>& rows, int k, std::uint64_t seed,
                        int restarts = 50);

// Index k in [1, max_k] maximizing the gap values[k] - values[k-1] of the
// ascending eigenvalue sequence; the smallest index wins ties.
int eigengap_k(const std::vector<double>& values, int max_k = 8);

// Clusters n points given their symmetric affinity matrix: symmetric
// normalized Laplacian, k smallest eigenvectors as the embedding, k-means on
// the rows. k == 0 picks k by the eigengap rule. Throws SingularDegreeError
// when a point has zero total affinity, ConfigError for a bad k.
std::vector<int> spectral_cluster(const std::vector<double>& affinity, int n, int k,
                                  std::uint64_t seed);

}  // namespace cognav
