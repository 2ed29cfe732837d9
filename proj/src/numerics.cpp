#include "fedaux/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedaux {

Matrix::Matrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(uint64_t seed) : seed_(seed), gen_(seed) {}

uint64_t Rng::u64() { return gen_(); }

double Rng::uniform() {
  return static_cast<double>(u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

int Rng::uniform_int(int n) {
  if (n <= 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
  return static_cast<int>((static_cast<unsigned __int128>(u64()) * static_cast<uint64_t>(n)) >> 64);
}

Rng Rng::substream(uint64_t a, uint64_t b) const {
  uint64_t h = seed_;
  h = splitmix64(h ^ splitmix64(a + 0x100));
  h = splitmix64(h ^ splitmix64(b + 0x200));
  return Rng(h);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    const double* ar = a.row(i);
    double* orow = out.row(i);
    for (int k = 0; k < a.cols(); ++k) {
      double aik = ar[k];
      if (aik == 0.0) continue;
      const double* br = b.row(k);
      for (int j = 0; j < b.cols(); ++j) orow[j] += aik * br[j];
    }
  }
  return out;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("matmul_at_b: row counts differ");
  Matrix out(a.cols(), b.cols());
  for (int k = 0; k < a.rows(); ++k) {
    const double* ar = a.row(k);
    const double* br = b.row(k);
    for (int i = 0; i < a.cols(); ++i) {
      double aki = ar[i];
      if (aki == 0.0) continue;
      double* orow = out.row(i);
      for (int j = 0; j < b.cols(); ++j) orow[j] += aki * br[j];
    }
  }
  return out;
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("matmul_a_bt: column counts differ");
  Matrix out(a.rows(), b.rows());
  for (int i = 0; i < a.rows(); ++i) {
    const double* ar = a.row(i);
    for (int j = 0; j < b.rows(); ++j) {
      const double* br = b.row(j);
      double acc = 0.0;
      for (int k = 0; k < a.cols(); ++k) acc += ar[k] * br[k];
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != static_cast<int>(x.size()))
    throw std::invalid_argument("matvec: dimension mismatch");
  Vector out(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    const double* ar = a.row(i);
    double acc = 0.0;
    for (int j = 0; j < a.cols(); ++j) acc += ar[j] * x[j];
    out[i] = acc;
  }
  return out;
}

double dot(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) throw std::invalid_argument("dot: length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc;
}

double norm(const Vector& v) { return std::sqrt(dot(v, v)); }

double frobenius_norm(const Matrix& a) {
  double acc = 0.0;
  for (double x : a.data()) acc += x * x;
  return std::sqrt(acc);
}

void axpy(Vector& y, double alpha, const Vector& x) {
  if (y.size() != x.size()) throw std::invalid_argument("axpy: length mismatch");
  for (size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void scale_inplace(Vector& v, double alpha) {
  for (double& x : v) x *= alpha;
}

Vector softmax_row(const Vector& v, double scale) {
  if (v.empty()) throw std::invalid_argument("softmax_row: empty input");
  if (scale < 0.0) throw std::invalid_argument("softmax_row: scale must be >= 0");
  Vector x(v.size());
  for (size_t i = 0; i < v.size(); ++i) x[i] = scale * v[i];
  double m = *std::max_element(x.begin(), x.end());
  double sum = 0.0;
  for (double& e : x) {
    e = std::exp(e - m);
    sum += e;
  }
  for (double& e : x) e /= sum;
  return x;
}

double cosine(const Vector& u, const Vector& v) {
  double nu = norm(u);
  double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) throw std::invalid_argument("cosine: zero-norm vector");
  return dot(u, v) / (nu * nv);
}

PowerIteration power_iteration(const Matrix& c, int iters, Rng& rng) {
  if (c.rows() != c.cols()) throw std::invalid_argument("power_iteration: matrix not square");
  if (c.rows() == 0) throw std::invalid_argument("power_iteration: empty matrix");
  int n = c.rows();
  Vector v(n);
  double nv = 0.0;
  while (nv == 0.0) {
    for (double& x : v) x = rng.normal();
    nv = norm(v);
  }
  scale_inplace(v, 1.0 / nv);

  PowerIteration result;
  for (int it = 0; it < iters; ++it) {
    Vector w = matvec(c, v);
    double nw = norm(w);
    if (nw == 0.0) break;  // v is in the null space; Rayleigh quotient is 0
    scale_inplace(w, 1.0 / nw);
    v = w;
    Vector cv = matvec(c, v);
    result.rayleigh_history.push_back(dot(v, cv));
  }
  // Fix the sign so repeated runs agree: largest-magnitude entry positive.
  int arg = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  if (v[arg] < 0.0) scale_inplace(v, -1.0);

  result.eigvec = v;
  result.eigval = result.rayleigh_history.empty() ? 0.0 : result.rayleigh_history.back();
  if (result.rayleigh_history.empty()) result.eigval = dot(v, matvec(c, v));
  return result;
}

}  // namespace fedaux
