#ifndef ADSSM_MODEL_HPP
#define ADSSM_MODEL_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "adssm/params.hpp"
#include "adssm/types.hpp"

namespace adssm::model {

constexpr double kVarianceFloor = 1e-4;

struct Attention {
    Vec context;  // latent
    Vec weights;  // T, sums to 1
};

struct GaussianParams {
    Vec mean;
    Vec var;
};

struct LatentPath {
    Mat means;      // T x latent
    Mat variances;  // T x latent
    Mat samples;    // T x latent
    Mat context;    // T x latent (c_t used on the prior side, when computed)
    Mat attention;  // T x T, row t = alpha_{t,.}
};

struct ElboBreakdown {
    double reconstruction = 0.0;
    std::vector<double> kl_terms;
    double beta = 0.0;
    double total = 0.0;
};

struct ElboOptions {
    // Literal O(T^2) reading of the posterior recurrences: the forward
    // recurrent state at step t is rebuilt over y_{t:T} only.
    bool strict_posterior = false;
};

// s_i = v_s' tanh(W_s [z_prev; W_x x_i] + b_s); alpha = softmax(s);
// context = sum_i alpha_i (W_x x_i).
Attention attend(const Vec& z_prev, const Mat& x, const ParameterSet& params);

// Gated transition: mu = (1-g) (.) (W_mu [z;c] + b_mu) + g (.) d,
// var = softplus(W_var relu(d) + b_var) + floor.
GaussianParams transition(const Vec& z, const Vec& context,
                          const ParameterSet& params);

// Two-hidden-layer ReLU net; emission covariance is fixed to identity.
Vec emit(const Vec& z, const ParameterSet& params);

// log N(y | mu, I), constant included.
double gaussian_loglik_identity(const Vec& y, const Vec& mu);

double kl_diag_gaussians(const Vec& mu_q, const Vec& var_q,
                         const Vec& mu_p, const Vec& var_p);

// The reparameterization draws: row t holds the latent-dim standard
// normal vector used for z_t. Shared by elbo and its gradient path.
Mat draw_eps(std::uint64_t seed, std::int64_t steps, int latent);

LatentPath posterior_path(const Mat& y, const ParameterSet& params,
                          std::uint64_t seed,
                          const ElboOptions& opts = {});

ElboBreakdown elbo(const Mat& x, const Mat& y, const ParameterSet& params,
                   double beta, std::uint64_t seed,
                   const ElboOptions& opts = {});

struct ChunkPair {
    Mat x;  // T x n_pp
    Mat y;  // T x n_rr
    std::string chunk_id;
};

// Deterministic per-chunk seed derivation for batched evaluation.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// loss = -mean ELBO over the batch; exact reverse-mode gradients for
// every tensor in params. Chunk i uses derive_seed(seed, i).
std::pair<double, ParameterSet> loss_and_gradients(
    const std::vector<ChunkPair>& batch, const ParameterSet& params,
    double beta, std::uint64_t seed, const ElboOptions& opts = {});

}  // namespace adssm::model

#endif
