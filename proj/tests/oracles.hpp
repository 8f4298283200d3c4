#pragma once

// Independent reference implementations used only by the tests. They share
// no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

struct Eigen {
  std::vector<double> values;  // descending
  Dense vectors;               // vectors[k] is the k-th eigenvector
};

// Cyclic Jacobi rotations on a symmetric matrix until the off-diagonal mass
// is negligible.
inline Eigen jacobi(Dense a) {
  const std::size_t n = a.size();
  Dense v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        total += a[i][j] * a[i][j];
        if (i != j) off += a[i][j] * a[i][j];
      }
    }
    if (off <= 1e-30 * std::max(total, 1e-300)) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  Eigen out;
  for (std::size_t k : order) {
    out.values.push_back(a[k][k]);
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = v[i][k];
    out.vectors.push_back(std::move(col));
  }
  return out;
}

// Largest-magnitude coordinate made positive, first index on ties.
inline void sign_normalise(std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (v[best] < 0) {
    for (double& x : v) x = -x;
  }
}

inline Dense covariance(const Dense& rows) {
  const std::size_t n = rows.size(), d = rows[0].size();
  std::vector<double> mean(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  Dense c(d, std::vector<double>(d, 0.0));
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) c[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
    }
  }
  for (auto& row : c) {
    for (double& x : row) x /= static_cast<double>(n - 1);
  }
  return c;
}

// Retrieval metrics by direct loops over the relevance flags.
inline double precision(const std::vector<int>& hits, std::size_t k) {
  double n = 0;
  for (std::size_t i = 0; i < k && i < hits.size(); ++i) n += hits[i] ? 1 : 0;
  return n / static_cast<double>(k);
}

inline double weighted(const std::vector<int>& hits, std::size_t k) {
  double num = 0, h = 0;
  for (std::size_t i = 1; i <= k; ++i) {
    h += 1.0 / static_cast<double>(i);
    if (i - 1 < hits.size() && hits[i - 1]) num += 1.0 / static_cast<double>(i);
  }
  return num / h;
}

// Queries without any valid candidate are skipped.
inline double error(const std::vector<std::vector<int>>& hits, const std::vector<int>& any_valid, std::size_t k) {
  double misses = 0, counted = 0;
  for (std::size_t q = 0; q < hits.size(); ++q) {
    if (!any_valid[q]) continue;
    counted += 1;
    bool found = false;
    for (std::size_t i = 0; i < k && i < hits[q].size(); ++i) found = found || hits[q][i];
    if (!found) misses += 1;
  }
  return counted == 0 ? 0.0 : misses / counted;
}

// Scalar long double loss of the VAE for one input. Layers are laid out as
// encoder hidden layers, mu head, logvar head, decoder hidden layers, output;
// each is a row-major out x in weight block followed by its bias.
struct VaeShape {
  std::size_t in, out;
};

inline long double vae_loss(const std::vector<VaeShape>& layers, std::size_t n_hidden,
                            const std::vector<long double>& p, const std::vector<float>& x,
                            const std::vector<double>& noise, double beta) {
  std::vector<std::size_t> offset;
  std::size_t o = 0;
  for (const auto& l : layers) {
    offset.push_back(o);
    o += l.in * l.out + l.out;
  }
  auto affine = [&](std::size_t k, const std::vector<long double>& a) {
    const auto& l = layers[k];
    std::vector<long double> r(l.out);
    for (std::size_t i = 0; i < l.out; ++i) {
      long double acc = p[offset[k] + l.in * l.out + i];
      for (std::size_t j = 0; j < l.in; ++j) acc += p[offset[k] + i * l.in + j] * a[j];
      r[i] = acc;
    }
    return r;
  };
  auto relu = [](std::vector<long double> v) {
    for (auto& e : v) e = std::max(e, 0.0L);
    return v;
  };
  std::vector<long double> a(x.begin(), x.end());
  for (std::size_t k = 0; k < n_hidden; ++k) a = relu(affine(k, a));
  const auto mu = affine(n_hidden, a);
  auto lv = affine(n_hidden + 1, a);
  long double kl = 0;
  std::vector<long double> z(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    lv[i] = std::clamp(lv[i], -10.0L, 10.0L);
    kl += 0.5L * (mu[i] * mu[i] + std::exp(lv[i]) - 1.0L - lv[i]);
    z[i] = mu[i] + std::exp(0.5L * lv[i]) * noise[i];
  }
  a = z;
  for (std::size_t k = 0; k < n_hidden; ++k) a = relu(affine(n_hidden + 2 + k, a));
  const auto out = affine(2 * n_hidden + 2, a);
  long double recon = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const long double y = 1.0L / (1.0L + std::exp(-out[i]));
    recon += (y - x[i]) * (y - x[i]);
  }
  return recon + beta * kl;
}

}  // namespace oracle
