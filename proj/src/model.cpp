#include "adssm/model.hpp"

#include <cmath>
#include <map>
#include <random>

#include "adssm/ad.hpp"

namespace adssm::model {

namespace {

constexpr double kLn2Pi = 1.8378770664093453;

Vec softplus_vec(const Vec& x) {
    return x.unaryExpr([](double v) {
        return v > 30.0 ? v : std::log1p(std::exp(v));
    });
}

Vec sigmoid_vec(const Vec& x) {
    return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

Vec concat(const Vec& a, const Vec& b) {
    Vec out(a.size() + b.size());
    out << a, b;
    return out;
}

Vec gru_step(const ParameterSet& p, const std::string& prefix, const Vec& x,
             const Vec& h) {
    const Vec r = sigmoid_vec(p.at(prefix + "W_r") * x + p.at(prefix + "U_r") * h +
                              p.at(prefix + "b_r"));
    const Vec u = sigmoid_vec(p.at(prefix + "W_u") * x + p.at(prefix + "U_u") * h +
                              p.at(prefix + "b_u"));
    const Vec rh = (r.array() * h.array()).matrix();
    const Vec n = (p.at(prefix + "W_n") * x + p.at(prefix + "U_n") * rh +
                   p.at(prefix + "b_n"))
                      .array()
                      .tanh()
                      .matrix();
    return ((1.0 - u.array()) * n.array() + u.array() * h.array()).matrix();
}

}  // namespace

Attention attend(const Vec& z_prev, const Mat& x, const ParameterSet& p) {
    const std::int64_t steps = x.rows();
    const Mat& w_x = p.at("score.W_x");
    const Mat& w_s = p.at("score.W_s");
    const Vec& b_s = p.at("score.b_s");
    const Vec& v_s = p.at("score.v_s");

    Mat embedded(w_x.rows(), steps);  // column i = W_x x_i
    Vec scores(steps);
    for (std::int64_t i = 0; i < steps; ++i) {
        embedded.col(i) = w_x * x.row(i).transpose();
        const Vec hidden =
            (w_s * concat(z_prev, embedded.col(i)) + b_s).array().tanh().matrix();
        scores(i) = v_s.dot(hidden);
    }
    Eigen::ArrayXd e = (scores.array() - scores.maxCoeff()).exp();
    Attention out;
    out.weights = (e / e.sum()).matrix();
    out.context = embedded * out.weights;
    return out;
}

GaussianParams transition(const Vec& z, const Vec& context,
                          const ParameterSet& p) {
    const Vec zc = concat(z, context);
    const Vec g1 = (p.at("trans.W_g1") * zc + p.at("trans.b_g1")).cwiseMax(0.0);
    const Vec g2 = (p.at("trans.W_g2") * g1 + p.at("trans.b_g2")).cwiseMax(0.0);
    const Vec gate = sigmoid_vec(p.at("trans.W_g3") * g2 + p.at("trans.b_g3"));

    const Vec d1 = (p.at("trans.W_d1") * zc + p.at("trans.b_d1")).cwiseMax(0.0);
    const Vec d2 = (p.at("trans.W_d2") * d1 + p.at("trans.b_d2")).cwiseMax(0.0);
    const Vec d = p.at("trans.W_d3") * d2 + p.at("trans.b_d3");

    const Vec linear = p.at("trans.W_mu") * zc + p.at("trans.b_mu");
    GaussianParams out;
    out.mean = ((1.0 - gate.array()) * linear.array() + gate.array() * d.array())
                   .matrix();
    out.var = softplus_vec(p.at("trans.W_var") * d.cwiseMax(0.0) +
                           p.at("trans.b_var"))
                  .array()
                  .matrix();
    out.var.array() += kVarianceFloor;
    return out;
}

Vec emit(const Vec& z, const ParameterSet& p) {
    const Vec e1 = (p.at("emit.W_e1") * z + p.at("emit.b_e1")).cwiseMax(0.0);
    const Vec e2 = (p.at("emit.W_e2") * e1 + p.at("emit.b_e2")).cwiseMax(0.0);
    return p.at("emit.W_e3") * e2 + p.at("emit.b_e3");
}

double gaussian_loglik_identity(const Vec& y, const Vec& mu) {
    if (y.size() != mu.size()) throw InvalidArgument("loglik size mismatch");
    return -0.5 * (y - mu).squaredNorm() -
           0.5 * static_cast<double>(y.size()) * kLn2Pi;
}

double kl_diag_gaussians(const Vec& mu_q, const Vec& var_q, const Vec& mu_p,
                         const Vec& var_p) {
    if (mu_q.size() != var_q.size() || mu_q.size() != mu_p.size() ||
        mu_q.size() != var_p.size())
        throw InvalidArgument("kl_diag_gaussians size mismatch");
    if ((var_q.array() <= 0.0).any() || (var_p.array() <= 0.0).any())
        throw InvalidArgument("kl_diag_gaussians requires positive variances");
    const auto diff = (mu_q - mu_p).array();
    return (0.5 * (var_p.array() / var_q.array()).log() +
            (var_q.array() + diff * diff) / (2.0 * var_p.array()) - 0.5)
        .sum();
}

Mat draw_eps(std::uint64_t seed, std::int64_t steps, int latent) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat eps(steps, latent);
    for (std::int64_t t = 0; t < steps; ++t)
        for (int d = 0; d < latent; ++d) eps(t, d) = gauss(rng);
    return eps;
}

LatentPath posterior_path(const Mat& y, const ParameterSet& p,
                          std::uint64_t seed, const ElboOptions& opts) {
    const std::int64_t steps = y.rows();
    if (steps < 1) throw InvalidArgument("posterior_path needs T >= 1");
    const Dims& dims = p.dims();
    const int L = dims.latent, H = dims.hidden;

    Mat embedded(H, steps);  // column t = W_y y_t
    for (std::int64_t t = 0; t < steps; ++t)
        embedded.col(t) = p.at("post.W_y") * y.row(t).transpose();

    // Backward recurrence: state at column t has consumed y_T .. y_t.
    Mat h_states(H, steps);
    {
        Vec h = Vec::Zero(H);
        for (std::int64_t t = steps - 1; t >= 0; --t) {
            h = gru_step(p, "post.bwd.", embedded.col(t), h);
            h_states.col(t) = h;
        }
    }
    // Forward recurrence: state at column t has consumed y_1 .. y_t, or in
    // strict mode is rebuilt over y_t .. y_T alone.
    Mat g_states(H, steps);
    if (opts.strict_posterior) {
        for (std::int64_t t = 0; t < steps; ++t) {
            Vec g = Vec::Zero(H);
            for (std::int64_t i = t; i < steps; ++i)
                g = gru_step(p, "post.fwd.", embedded.col(i), g);
            g_states.col(t) = g;
        }
    } else {
        Vec g = Vec::Zero(H);
        for (std::int64_t t = 0; t < steps; ++t) {
            g = gru_step(p, "post.fwd.", embedded.col(t), g);
            g_states.col(t) = g;
        }
    }

    const Mat eps = draw_eps(seed, steps, L);
    LatentPath path;
    path.means.resize(steps, L);
    path.variances.resize(steps, L);
    path.samples.resize(steps, L);

    Vec z_prev = p.at("z_init");
    for (std::int64_t t = 0; t < steps; ++t) {
        const Vec combined =
            ((p.at("post.W_h") * z_prev + p.at("post.b_h")).array().tanh() +
             h_states.col(t).array() + g_states.col(t).array())
                .matrix() /
            3.0;
        const Vec mu = p.at("post.W_mu") * combined + p.at("post.b_mu");
        Vec var = softplus_vec(p.at("post.W_var") * combined + p.at("post.b_var"));
        var.array() += kVarianceFloor;
        const Vec z =
            mu.array() + var.array().sqrt() * eps.row(t).transpose().array();
        path.means.row(t) = mu.transpose();
        path.variances.row(t) = var.transpose();
        path.samples.row(t) = z.transpose();
        z_prev = z;
    }
    return path;
}

ElboBreakdown elbo(const Mat& x, const Mat& y, const ParameterSet& p,
                   double beta, std::uint64_t seed, const ElboOptions& opts) {
    if (x.rows() != y.rows())
        throw InvalidArgument("elbo requires aligned x and y with equal T");
    if (!(beta >= 0.0 && beta <= 1.0))
        throw InvalidArgument("beta must lie in [0, 1]");
    const std::int64_t steps = x.rows();

    LatentPath path = posterior_path(y, p, seed, opts);
    path.context.resize(steps, p.dims().latent);
    path.attention.resize(steps, steps);

    ElboBreakdown out;
    out.beta = beta;
    out.kl_terms.resize(steps);

    Vec z_prev = p.at("z_init");
    for (std::int64_t t = 0; t < steps; ++t) {
        const Attention attn = attend(z_prev, x, p);
        const GaussianParams prior = transition(z_prev, attn.context, p);
        path.context.row(t) = attn.context.transpose();
        path.attention.row(t) = attn.weights.transpose();

        out.kl_terms[t] = kl_diag_gaussians(
            path.means.row(t).transpose(), path.variances.row(t).transpose(),
            prior.mean, prior.var);

        const Vec z = path.samples.row(t).transpose();
        out.reconstruction +=
            gaussian_loglik_identity(y.row(t).transpose(), emit(z, p));
        z_prev = z;
    }
    double kl_sum = 0.0;
    for (double k : out.kl_terms) kl_sum += k;
    out.total = out.reconstruction - beta * kl_sum;
    return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 over the combined value
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Gradient path: the same computation rebuilt on the reverse-mode tape.

namespace {

using ad::Tape;
using ad::Var;

struct TapedParams {
    std::map<std::string, Var> leaves;

    TapedParams(Tape& tape, const ParameterSet& p) {
        for (const auto& name : p.names()) leaves[name] = tape.leaf(p.at(name));
    }
    Var operator[](const std::string& name) const { return leaves.at(name); }
};

Var affine(Tape& t, const TapedParams& p, const std::string& w,
           const std::string& b, Var x) {
    return ad::add(t, ad::matmul(t, p[w], x), p[b]);
}

Var taped_gru_step(Tape& t, const TapedParams& p, const std::string& prefix,
                   Var x, Var h) {
    Var r = ad::sigmoid(t, ad::add(t, ad::add(t, ad::matmul(t, p[prefix + "W_r"], x),
                                              ad::matmul(t, p[prefix + "U_r"], h)),
                                   p[prefix + "b_r"]));
    Var u = ad::sigmoid(t, ad::add(t, ad::add(t, ad::matmul(t, p[prefix + "W_u"], x),
                                              ad::matmul(t, p[prefix + "U_u"], h)),
                                   p[prefix + "b_u"]));
    Var rh = ad::cmul(t, r, h);
    Var n = ad::tanh(t, ad::add(t, ad::add(t, ad::matmul(t, p[prefix + "W_n"], x),
                                           ad::matmul(t, p[prefix + "U_n"], rh)),
                                p[prefix + "b_n"]));
    Var ones = t.constant(Mat::Ones(u.rows(), 1));
    return ad::add(t, ad::cmul(t, ad::sub(t, ones, u), n), ad::cmul(t, u, h));
}

struct TapedGaussian {
    Var mean;
    Var var;
};

TapedGaussian taped_transition(Tape& t, const TapedParams& p, Var z, Var c) {
    Var zc = ad::vstack(t, z, c);
    Var g2 = ad::relu(t, affine(t, p, "trans.W_g2", "trans.b_g2",
                                ad::relu(t, affine(t, p, "trans.W_g1", "trans.b_g1", zc))));
    Var gate = ad::sigmoid(t, affine(t, p, "trans.W_g3", "trans.b_g3", g2));
    Var d2 = ad::relu(t, affine(t, p, "trans.W_d2", "trans.b_d2",
                                ad::relu(t, affine(t, p, "trans.W_d1", "trans.b_d1", zc))));
    Var d = affine(t, p, "trans.W_d3", "trans.b_d3", d2);
    Var linear = affine(t, p, "trans.W_mu", "trans.b_mu", zc);
    Var ones = t.constant(Mat::Ones(gate.rows(), 1));
    TapedGaussian out;
    out.mean = ad::add(t, ad::cmul(t, ad::sub(t, ones, gate), linear),
                       ad::cmul(t, gate, d));
    out.var = ad::add_const(
        t, ad::softplus(t, affine(t, p, "trans.W_var", "trans.b_var",
                                  ad::relu(t, d))),
        kVarianceFloor);
    return out;
}

Var taped_emit(Tape& t, const TapedParams& p, Var z) {
    Var e1 = ad::relu(t, affine(t, p, "emit.W_e1", "emit.b_e1", z));
    Var e2 = ad::relu(t, affine(t, p, "emit.W_e2", "emit.b_e2", e1));
    return affine(t, p, "emit.W_e3", "emit.b_e3", e2);
}

// Attention-weighted context at one timestep: softmax over the score
// MLP outputs, applied to the embedded inputs.
Var taped_context(Tape& t, const TapedParams& p, Var z_prev,
                  const std::vector<Var>& x_emb) {
    std::vector<Var> scores;
    scores.reserve(x_emb.size());
    Var v_s_t = ad::transpose(t, p["score.v_s"]);
    for (Var e : x_emb) {
        Var hidden = ad::tanh(
            t, ad::add(t, ad::matmul(t, p["score.W_s"], ad::vstack(t, z_prev, e)),
                       p["score.b_s"]));
        scores.push_back(ad::matmul(t, v_s_t, hidden));
    }
    Var alpha = ad::softmax(t, ad::vstack_list(t, scores));
    return ad::matmul(t, ad::hstack(t, x_emb), alpha);
}

// neg ELBO of one chunk on the tape; returns the scalar loss node.
Var taped_chunk_neg_elbo(Tape& t, const TapedParams& p, const Mat& x,
                         const Mat& y, double beta, const Mat& eps,
                         const ElboOptions& opts) {
    const std::int64_t steps = x.rows();

    // Input embeddings (shared across timesteps).
    std::vector<Var> x_emb, y_emb;
    for (std::int64_t i = 0; i < steps; ++i) {
        x_emb.push_back(ad::matmul(t, p["score.W_x"],
                                   t.constant(x.row(i).transpose())));
        y_emb.push_back(ad::matmul(t, p["post.W_y"],
                                   t.constant(y.row(i).transpose())));
    }

    // Posterior recurrent states.
    std::vector<Var> h_states(steps), g_states(steps);
    {
        Var h = t.constant(Mat::Zero(p["post.bwd.b_r"].rows(), 1));
        for (std::int64_t i = steps - 1; i >= 0; --i) {
            h = taped_gru_step(t, p, "post.bwd.", y_emb[i], h);
            h_states[i] = h;
        }
    }
    if (opts.strict_posterior) {
        for (std::int64_t i = 0; i < steps; ++i) {
            Var g = t.constant(Mat::Zero(p["post.fwd.b_r"].rows(), 1));
            for (std::int64_t j = i; j < steps; ++j)
                g = taped_gru_step(t, p, "post.fwd.", y_emb[j], g);
            g_states[i] = g;
        }
    } else {
        Var g = t.constant(Mat::Zero(p["post.fwd.b_r"].rows(), 1));
        for (std::int64_t i = 0; i < steps; ++i) {
            g = taped_gru_step(t, p, "post.fwd.", y_emb[i], g);
            g_states[i] = g;
        }
    }

    Var z_prev = p["z_init"];
    Var neg = t.scalar(0.0);
    for (std::int64_t step = 0; step < steps; ++step) {
        // Posterior parameters for z_t.
        Var combined = ad::scale(
            t,
            ad::add(t,
                    ad::add(t, ad::tanh(t, affine(t, p, "post.W_h", "post.b_h", z_prev)),
                            h_states[step]),
                    g_states[step]),
            1.0 / 3.0);
        Var mu_q = affine(t, p, "post.W_mu", "post.b_mu", combined);
        Var var_q = ad::add_const(
            t, ad::softplus(t, affine(t, p, "post.W_var", "post.b_var", combined)),
            kVarianceFloor);
        Var z = ad::add(t, mu_q,
                        ad::cmul(t, ad::sqrt(t, var_q),
                                 t.constant(eps.row(step).transpose())));

        // Prior transition from z_{t-1} through attention.
        Var context = taped_context(t, p, z_prev, x_emb);
        TapedGaussian prior = taped_transition(t, p, z_prev, context);

        // KL(q || p), diagonal Gaussians.
        Var diff = ad::sub(t, mu_q, prior.mean);
        Var kl_vec = ad::add_const(
            t,
            ad::add(t,
                    ad::scale(t, ad::log(t, ad::cdiv(t, prior.var, var_q)), 0.5),
                    ad::cdiv(t, ad::add(t, var_q, ad::square(t, diff)),
                             ad::scale(t, prior.var, 2.0))),
            -0.5);
        Var kl = ad::sum(t, kl_vec);

        // Reconstruction: log N(y_t | emit(z_t), I).
        Var resid = ad::sub(t, t.constant(y.row(step).transpose()),
                            taped_emit(t, p, z));
        Var recon = ad::add_const(
            t, ad::scale(t, ad::sum(t, ad::square(t, resid)), -0.5),
            -0.5 * static_cast<double>(y.cols()) * kLn2Pi);

        neg = ad::add(t, neg,
                      ad::sub(t, ad::scale(t, kl, beta), recon));
        z_prev = z;
    }
    return neg;
}

}  // namespace

std::pair<double, ParameterSet> loss_and_gradients(
    const std::vector<ChunkPair>& batch, const ParameterSet& params,
    double beta, std::uint64_t seed, const ElboOptions& opts) {
    if (batch.empty()) throw InvalidArgument("loss_and_gradients needs a batch");
    ParameterSet grads = params.zeros_like();
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;

    for (std::size_t i = 0; i < batch.size(); ++i) {
        const ChunkPair& chunk = batch[i];
        if (chunk.x.rows() != chunk.y.rows())
            throw InvalidArgument("batch chunk has mismatched T: " + chunk.chunk_id);
        Tape tape;
        TapedParams tp(tape, params);
        const Mat eps = draw_eps(derive_seed(seed, i),
                                 chunk.x.rows(), params.dims().latent);
        Var neg = taped_chunk_neg_elbo(tape, tp, chunk.x, chunk.y, beta, eps, opts);
        const double chunk_loss = neg.value()(0, 0);
        if (!std::isfinite(chunk_loss))
            throw NumericError("non-finite loss on chunk " +
                               (chunk.chunk_id.empty() ? std::to_string(i)
                                                       : chunk.chunk_id));
        loss += inv_b * chunk_loss;
        tape.backward(neg);
        for (const auto& name : params.names())
            grads.at(name) += inv_b * tp[name].grad();
    }
    return {loss, grads};
}

}  // namespace adssm::model
