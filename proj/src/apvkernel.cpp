#include "fedaux/apvkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fedaux {

double embedding_scale(const Matrix& h) {
  double best = 0.0;
  for (int i = 0; i < h.rows(); ++i) {
    double acc = 0.0;
    const double* r = h.row(i);
    for (int j = 0; j < h.cols(); ++j) acc += r[j] * r[j];
    best = std::max(best, acc);
  }
  return std::sqrt(best);
}

Vector project_scores(const Matrix& h, const Vector& apv, double scale) {
  if (static_cast<int>(apv.size()) != h.cols())
    throw std::invalid_argument("project_scores: apv dimension != embedding width");
  Vector s(h.rows(), 0.0);
  if (scale <= 0.0) return s;
  for (int i = 0; i < h.rows(); ++i) {
    const double* r = h.row(i);
    double acc = 0.0;
    for (int j = 0; j < h.cols(); ++j) acc += r[j] * apv[j];
    s[i] = acc / scale;
  }
  return s;
}

std::pair<Matrix, Vector> kernel_matrix(const Vector& s, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("kernel_matrix: sigma must be > 0");
  int n = static_cast<int>(s.size());
  Matrix k(n, n);
  double inv = 1.0 / (sigma * sigma);
  for (int i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double d = s[i] - s[j];
      double w = std::exp(-d * d * inv);
      k(i, j) = w;
      k(j, i) = w;
    }
  }
  Vector m(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* r = k.row(i);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += r[j];
    m[i] = acc;
  }
  return {std::move(k), std::move(m)};
}

Matrix smooth_aggregate(const Matrix& k, const Vector& m, const Matrix& h) {
  if (k.rows() != k.cols() || k.rows() != h.rows() ||
      static_cast<int>(m.size()) != k.rows())
    throw std::invalid_argument("smooth_aggregate: shape mismatch");
  Matrix z = matmul(k, h);
  for (int i = 0; i < z.rows(); ++i) {
    double inv = 1.0 / m[i];
    double* r = z.row(i);
    for (int j = 0; j < z.cols(); ++j) r[j] *= inv;
  }
  return z;
}

std::vector<int> hard_sort(const Vector& s) {
  std::vector<int> perm(s.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return s[a] < s[b]; });
  return perm;
}

Matrix gather(const Matrix& h, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != h.rows())
    throw std::invalid_argument("gather: permutation length != row count");
  Matrix out(h.rows(), h.cols());
  for (int t = 0; t < h.rows(); ++t) {
    int src = perm[t];
    if (src < 0 || src >= h.rows()) throw std::invalid_argument("gather: index out of range");
    const double* r = h.row(src);
    std::copy(r, r + h.cols(), out.row(t));
  }
  return out;
}

Vector grad_score(const Vector& h, double s, const Vector& apv) {
  if (h.size() != apv.size()) throw std::invalid_argument("grad_score: dimension mismatch");
  Vector g(h.size());
  for (size_t i = 0; i < h.size(); ++i) g[i] = h[i] - s * apv[i];
  return g;
}

Vector grad_kernel_entry(double s_i, double s_j, const Vector& h_i, const Vector& h_j,
                         const Vector& apv, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("grad_kernel_entry: sigma must be > 0");
  if (h_i.size() != h_j.size() || h_i.size() != apv.size())
    throw std::invalid_argument("grad_kernel_entry: dimension mismatch");
  double ds = s_i - s_j;
  double k = std::exp(-ds * ds / (sigma * sigma));
  double coef = -2.0 / (sigma * sigma) * ds * k;
  Vector g(apv.size());
  for (size_t t = 0; t < apv.size(); ++t) g[t] = coef * ((h_i[t] - h_j[t]) - ds * apv[t]);
  return g;
}

Vector grad_apv_loss(const Matrix& h, const Vector& apv, double sigma, const Matrix& upstream) {
  if (!h.same_shape(upstream))
    throw std::invalid_argument("grad_apv_loss: upstream shape != embedding shape");
  int n = h.rows(), d = h.cols();
  Vector grad(d, 0.0);
  double c = embedding_scale(h);
  if (c <= 0.0) return grad;

  Vector s = project_scores(h, apv, c);
  auto [k, m] = kernel_matrix(s, sigma);
  Matrix z = smooth_aggregate(k, m, h);

  double coef0 = -2.0 / (sigma * sigma);
  for (int i = 0; i < n; ++i) {
    const double* gi = upstream.row(i);
    const double* zi = z.row(i);
    for (int j = 0; j < n; ++j) {
      double ds = s[i] - s[j];
      if (ds == 0.0) continue;
      const double* hj = h.row(j);
      double gdot = 0.0;
      for (int t = 0; t < d; ++t) gdot += gi[t] * (hj[t] - zi[t]);
      double w = coef0 * (k(i, j) / m[i]) * ds * gdot;
      const double* hi = h.row(i);
      for (int t = 0; t < d; ++t) grad[t] += w * ((hi[t] - hj[t]) / c - ds * apv[t]);
    }
  }
  return grad;
}

KernelBackward kernel_backward(const Matrix& h, const Vector& apv, double sigma,
                               const Matrix& upstream, double scale) {
  if (!h.same_shape(upstream))
    throw std::invalid_argument("kernel_backward: upstream shape != embedding shape");
  int n = h.rows(), d = h.cols();
  KernelBackward out;
  out.d_h = Matrix(n, d);
  out.d_apv.assign(apv.size(), 0.0);

  Vector s = project_scores(h, apv, scale);
  auto [k, m] = kernel_matrix(s, sigma);
  Matrix z = smooth_aggregate(k, m, h);

  // Direct path: z_i = sum_j beta_ij h_j with beta_ij = K_ij / M_i, so
  // dL/dh_p picks up sum_i beta_ip g_i.
  for (int i = 0; i < n; ++i) {
    const double* gi = upstream.row(i);
    double inv_m = 1.0 / m[i];
    for (int p = 0; p < n; ++p) {
      double beta = k(i, p) * inv_m;
      double* dst = out.d_h.row(p);
      for (int t = 0; t < d; ++t) dst[t] += beta * gi[t];
    }
  }
  if (scale <= 0.0) return out;  // scores are constant zero; no score path

  // Score path. dL/dK_ij = <g_i, h_j - z_i> / M_i, and with the kernel's
  // symmetry the per-score sensitivity collapses to a single sweep over rows.
  Matrix dk(n, n);
  for (int i = 0; i < n; ++i) {
    const double* gi = upstream.row(i);
    const double* zi = z.row(i);
    double inv_m = 1.0 / m[i];
    for (int j = 0; j < n; ++j) {
      const double* hj = h.row(j);
      double acc = 0.0;
      for (int t = 0; t < d; ++t) acc += gi[t] * (hj[t] - zi[t]);
      dk(i, j) = acc * inv_m;
    }
  }
  double coef0 = -2.0 / (sigma * sigma);
  Vector dscore(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      double ds = s[i] - s[j];
      if (ds == 0.0) continue;
      acc += coef0 * ds * k(i, j) * (dk(i, j) + dk(j, i));
    }
    dscore[i] = acc;
  }
  // s_i = <h_i, a> / c with c frozen: the score path adds dscore_i * a / c to
  // dL/dh_i and dscore_i * h_i / c to dL/da.
  double inv_c = 1.0 / scale;
  for (int i = 0; i < n; ++i) {
    double w = dscore[i] * inv_c;
    double* dst = out.d_h.row(i);
    const double* hi = h.row(i);
    for (int t = 0; t < d; ++t) {
      dst[t] += w * apv[t];
      out.d_apv[t] += w * hi[t];
    }
  }
  return out;
}

Matrix grad_h_through_kernel(const Matrix& h, const Vector& apv, double sigma,
                             const Matrix& upstream) {
  return kernel_backward(h, apv, sigma, upstream, embedding_scale(h)).d_h;
}

}  // namespace fedaux
