#include "adssm/gradcheck.hpp"

#include <cmath>
#include <random>

namespace adssm::model {

GradCheckResult gradient_check(std::uint64_t seed, const Dims& dims,
                               std::int64_t steps, double fd_step, double beta) {
    ParameterSet params(dims, seed);
    std::mt19937_64 rng(derive_seed(seed, 0xfd));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    std::vector<ChunkPair> batch(1);
    batch[0].x.resize(steps, dims.n_pp);
    batch[0].y.resize(steps, dims.n_rr);
    for (std::int64_t t = 0; t < steps; ++t) {
        for (int j = 0; j < dims.n_pp; ++j) batch[0].x(t, j) = unit(rng);
        for (int j = 0; j < dims.n_rr; ++j) batch[0].y(t, j) = unit(rng);
    }

    const auto [loss, grads] = loss_and_gradients(batch, params, beta, seed);
    (void)loss;

    auto loss_at = [&](const ParameterSet& p) {
        std::vector<ChunkPair> b = batch;
        // Forward value only; gradients recomputed but discarded.
        return loss_and_gradients(b, p, beta, seed).first;
    };

    GradCheckResult result;
    for (const auto& name : params.names()) {
        Mat& tensor = params.at(name);
        const Mat& analytic = grads.at(name);
        double group_max = 0.0;
        for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
            for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
                const double orig = tensor(r, c);
                tensor(r, c) = orig + fd_step;
                const double up = loss_at(params);
                tensor(r, c) = orig - fd_step;
                const double down = loss_at(params);
                tensor(r, c) = orig;
                const double fd = (up - down) / (2.0 * fd_step);
                const double a = analytic(r, c);
                const double rel = std::abs(a - fd) /
                                   std::max({1e-6, std::abs(a), std::abs(fd)});
                group_max = std::max(group_max, rel);
            }
        }
        result.group_max_rel_err[name] = group_max;
        result.max_rel_err = std::max(result.max_rel_err, group_max);
    }
    return result;
}

}  // namespace adssm::model
