#include "cognav/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cognav/errors.hpp"
#include "cognav/rng.hpp"

namespace cognav {

namespace {

double off_diagonal_norm(const std::vector<double>& a, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) s += a[static_cast<std::size_t>(i) * n + j] * a[static_cast<std::size_t>(i) * n + j];
    }
  }
  return std::sqrt(s);
}

}  // namespace

EigenSystem jacobi_eigensystem(const std::vector<double>& sym, int n, double tol, int max_sweeps) {
  if (n < 1) throw ConfigError("matrix dimension must be positive");
  if (sym.size() != static_cast<std::size_t>(n) * n) {
    throw ConfigError("matrix buffer does not match n * n");
  }
  std::vector<double> a = sym;
  std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
  const auto A = [&a, n](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
  const auto V = [&v, n](int i, int j) -> double& { return v[static_cast<std::size_t>(i) * n + j]; };

  for (int sweep = 0; sweep < max_sweeps && off_diagonal_norm(a, n) >= tol; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double tau = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = A(i, p);
          const double aiq = A(i, q);
          A(i, p) = c * aip - s * aiq;
          A(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = A(p, i);
          const double aqi = A(q, i);
          A(p, i) = c * api - s * aqi;
          A(q, i) = s * api + c * aqi;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = V(i, p);
          const double viq = V(i, q);
          V(i, p) = c * vip - s * viq;
          V(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return A(i, i) < A(j, j); });

  EigenSystem out;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (int k = 0; k < n; ++k) {
    const int col = order[static_cast<std::size_t>(k)];
    out.values[static_cast<std::size_t>(k)] = A(col, col);
    auto& vec = out.vectors[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i) vec[static_cast<std::size_t>(i)] = V(i, col);
    for (int i = 0; i < n; ++i) {
      if (vec[static_cast<std::size_t>(i)] != 0.0) {
        if (vec[static_cast<std::size_t>(i)] < 0.0) {
          for (double& x : vec) x = -x;
        }
        break;
      }
    }
  }
  return out;
}

namespace {

double sq_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

struct KmeansRun {
  std::vector<int> labels;
  double inertia = std::numeric_limits<double>::infinity();
};

KmeansRun kmeans_once(const std::vector<std::vector<double>>& rows, int k, Rng& rng) {
  const std::size_t m = rows.size();
  const std::size_t dim = rows[0].size();
  std::vector<std::vector<double>> centroids;
  centroids.reserve(static_cast<std::size_t>(k));

  centroids.push_back(rows[rng.index(m)]);
  std::vector<double> dist2(m);
  while (centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) best = std::min(best, sq_distance(rows[i], c));
      dist2[i] = best;
      total += best;
    }
    std::size_t pick;
    if (total > 0.0) {
      const double r = rng.real01() * total;
      double acc = 0.0;
      pick = m - 1;
      for (std::size_t i = 0; i < m; ++i) {
        acc += dist2[i];
        if (r < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.index(m);
    }
    centroids.push_back(rows[pick]);
  }

  std::vector<int> labels(m, 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < m; ++i) {
      int best = 0;
      double best_d = sq_distance(rows[i], centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d = sq_distance(rows[i], centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }

    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int lab : labels) ++counts[static_cast<std::size_t>(lab)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] != 0) continue;
      // Steal the point farthest from its current centroid.
      std::size_t worst = 0;
      double worst_d = -1.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (counts[static_cast<std::size_t>(labels[i])] <= 1) continue;
        const double d = sq_distance(rows[i], centroids[static_cast<std::size_t>(labels[i])]);
        if (d > worst_d) {
          worst_d = d;
          worst = i;
        }
      }
      --counts[static_cast<std::size_t>(labels[worst])];
      labels[worst] = c;
      ++counts[static_cast<std::size_t>(c)];
      changed = true;
    }

    for (auto& c : centroids) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      auto& c = centroids[static_cast<std::size_t>(labels[i])];
      for (std::size_t d = 0; d < dim; ++d) c[d] += rows[i][d];
    }
    for (int c = 0; c < k; ++c) {
      const double inv = 1.0 / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      for (double& x : centroids[static_cast<std::size_t>(c)]) x *= inv;
    }
    if (!changed && iter > 0) break;
  }

  KmeansRun run;
  run.labels = std::move(labels);
  run.inertia = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    run.inertia += sq_distance(rows[i], centroids[static_cast<std::size_t>(run.labels[i])]);
  }
  return run;
}

}  // namespace

std::vector<int> kmeans(const std::vector<std::vector<double>>& rows, int k, std::uint64_t seed,
                        int restarts) {
  if (rows.empty()) throw ConfigError("kmeans needs at least one point");
  if (k < 1 || static_cast<std::size_t>(k) > rows.size()) {
    throw ConfigError("cluster count must be in [1, point count]");
  }
  if (k == 1) return std::vector<int>(rows.size(), 0);

  Rng rng(seed);
  KmeansRun best;
  for (int r = 0; r < restarts; ++r) {
    KmeansRun run = kmeans_once(rows, k, rng);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best.labels;
}

int eigengap_k(const std::vector<double>& values, int max_k) {
  const int n = static_cast<int>(values.size());
  if (n <= 1) return 1;
  const int limit = std::min(max_k, n) - 1;
  int best_k = 1;
  double best_gap = -1.0;
  for (int k = 1; k <= limit; ++k) {
    const double gap = values[static_cast<std::size_t>(k)] - values[static_cast<std::size_t>(k) - 1];
    if (gap > best_gap) {
      best_gap = gap;
      best_k = k;
    }
  }
  return best_k;
}

std::vector<int> spectral_cluster(const std::vector<double>& affinity, int n, int k,
                                  std::uint64_t seed) {
  if (n < 1) throw ConfigError("need at least one point");
  if (affinity.size() != static_cast<std::size_t>(n) * n) {
    throw ConfigError("affinity buffer does not match n * n");
  }
  const auto At = [&affinity, n](int i, int j) {
    return affinity[static_cast<std::size_t>(i) * n + j];
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(At(i, j) - At(j, i)) > 1e-9) {
        throw ConfigError("affinity matrix is not symmetric");
      }
    }
  }
  if (k < 0 || k > n) throw ConfigError("cluster count must be in [0, point count]");
  if (n == 1) return {0};

  std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double d = 0.0;
    for (int j = 0; j < n; ++j) d += At(i, j);
    if (d <= 0.0) {
      throw SingularDegreeError("point has zero total affinity", std::to_string(i));
    }
    degree[static_cast<std::size_t>(i)] = d;
  }

  std::vector<double> lap(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double norm = At(i, j) / std::sqrt(degree[static_cast<std::size_t>(i)] *
                                               degree[static_cast<std::size_t>(j)]);
      lap[static_cast<std::size_t>(i) * n + j] = (i == j ? 1.0 : 0.0) - norm;
    }
  }

  const EigenSystem es = jacobi_eigensystem(lap, n);
  if (k == 0) k = eigengap_k(es.values, 8);
  if (k == 1) return std::vector<int>(static_cast<std::size_t>(n), 0);
  if (k == n) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::iota(labels.begin(), labels.end(), 0);
    return labels;
  }

  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n),
                                        std::vector<double>(static_cast<std::size_t>(k)));
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < k; ++c) {
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
          es.vectors[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
    }
  }
  for (auto& row : rows) {
    double norm = 0.0;
    for (double x : row) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (double& x : row) x /= norm;
    }
  }
  return kmeans(rows, k, seed);
}

}  // namespace cognav
