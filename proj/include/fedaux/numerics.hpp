#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fedaux {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Single carrier type for features,
// embeddings, kernels, layer weights and mixing matrices.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0);

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  double* row(int i) { return data_.data() + static_cast<size_t>(i) * cols_; }
  const double* row(int i) const { return data_.data() + static_cast<size_t>(i) * cols_; }

  Vector& data() { return data_; }
  const Vector& data() const { return data_; }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  Vector data_;
};

// Deterministic RNG. Engine is mt19937_64 (bit-exact across platforms per the
// C++ standard); the uniform/normal/integer mappings below are hand-rolled
// because the std <random> distributions are implementation-defined and would
// break the "same seed, same stream everywhere" guarantee.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t u64();

  // [0, 1), 53-bit mantissa.
  double uniform();
  double uniform(double lo, double hi);

  // Box-Muller with a cached spare; deterministic given the stream position.
  double normal();

  // [0, n), multiply-shift mapping.
  int uniform_int(int n);

  // Independent child stream keyed by (a, b); used to give client k in round t
  // its own stream without coupling to execution order.
  Rng substream(uint64_t a, uint64_t b) const;

  template <class T>
  void shuffle(std::vector<T>& xs) {
    for (int i = static_cast<int>(xs.size()) - 1; i > 0; --i) {
      int j = uniform_int(i + 1);
      std::swap(xs[i], xs[j]);
    }
  }

 private:
  uint64_t seed_;
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct PowerIteration {
  Vector eigvec;            // unit norm, largest-magnitude entry positive
  double eigval = 0.0;      // final Rayleigh quotient
  Vector rayleigh_history;  // one entry per iteration
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_at_b(const Matrix& a, const Matrix& b);  // transpose(a) * b
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);  // a * transpose(b)
Matrix transpose(const Matrix& a);
Vector matvec(const Matrix& a, const Vector& x);

double dot(const Vector& u, const Vector& v);
double norm(const Vector& v);
double frobenius_norm(const Matrix& a);
void axpy(Vector& y, double alpha, const Vector& x);  // y += alpha * x
void scale_inplace(Vector& v, double alpha);

// softmax(scale * v) with max subtraction; scale = 0 gives the uniform vector.
Vector softmax_row(const Vector& v, double scale);

// Cosine similarity; zero-norm input is a hard error.
double cosine(const Vector& u, const Vector& v);

// Dominant eigenpair of a symmetric PSD matrix. Start vector drawn from rng.
PowerIteration power_iteration(const Matrix& c, int iters, Rng& rng);

}  // namespace fedaux
