#pragma once

#include <utility>
#include <vector>

#include "fedaux/numerics.hpp"

namespace fedaux {

// Score projection, Gaussian kernel smoothing over score space, and the
// analytic gradients that flow back through it.
//
// Two score conventions live here on purpose:
//  * training path: s_i = <h_i / c, a> with c = max_j ||h_j|| frozen per pass
//    (stop-gradient), a unconstrained; gradients are plain derivatives.
//  * verification path (grad_score / grad_kernel_entry / grad_apv_loss):
//    a is kept on the unit sphere and gradients are the tangential ones you
//    get by differentiating through the renormalization a -> a / ||a||.

// Largest row 2-norm of H; 0 for an all-zero H.
double embedding_scale(const Matrix& h);

// s_i = <h_i, a> / scale. scale <= 0 (all-zero embeddings) yields zero scores.
Vector project_scores(const Matrix& h, const Vector& apv, double scale);

// K_ij = exp(-(s_i - s_j)^2 / sigma^2) and its row masses M_i = sum_j K_ij.
std::pair<Matrix, Vector> kernel_matrix(const Vector& s, double sigma);

// Z_i = (1 / M_i) * sum_j K_ij h_j.
Matrix smooth_aggregate(const Matrix& k, const Vector& m, const Matrix& h);

// Ascending stable sort permutation of the scores (ties keep index order).
std::vector<int> hard_sort(const Vector& s);
Matrix gather(const Matrix& h, const std::vector<int>& perm);

// d s_i / d a on the unit sphere: h - s * a.
Vector grad_score(const Vector& h, double s, const Vector& apv);

// d K_ij / d a on the unit sphere:
// -(2 / sigma^2) (s_i - s_j) K_ij [(h_i - h_j) - (s_i - s_j) a].
Vector grad_kernel_entry(double s_i, double s_j, const Vector& h_i, const Vector& h_j,
                         const Vector& apv, double sigma);

// Full loss gradient w.r.t. a through the kernel path, unit-sphere convention,
// with the max-norm score scaling applied to the h_i inside the scores.
// upstream holds g_i = dL/dz_i as rows.
Vector grad_apv_loss(const Matrix& h, const Vector& apv, double sigma, const Matrix& upstream);

struct KernelBackward {
  Matrix d_h;   // dL/dH through the z branch (direct + score paths)
  Vector d_apv; // plain dL/da, training convention
};

// Training-path backward through z = smooth_aggregate(kernel(project(H, a))).
// The scale is frozen: perturbations of H do not move 1 / max_j ||h_j||.
KernelBackward kernel_backward(const Matrix& h, const Vector& apv, double sigma,
                               const Matrix& upstream, double scale);

// dL/dH only, computing the scale internally.
Matrix grad_h_through_kernel(const Matrix& h, const Vector& apv, double sigma,
                             const Matrix& upstream);

}  // namespace fedaux
