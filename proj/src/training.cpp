#include "adssm/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <random>

#include "adssm/checkpoint.hpp"

namespace adssm::training {

void Schedule::validate() const {
    if (total_epochs < 1 || batch_size < 1 || anneal_end_epoch < 1)
        throw InvalidArgument("schedule fields must be positive");
    if (anneal_end_epoch > total_epochs)
        throw InvalidArgument("anneal_end_epoch must not exceed total_epochs");
}

void adam_step(model::ParameterSet& params, const model::ParameterSet& grads,
               OptimizerState& opt) {
    if (!grads.all_finite())
        throw NumericError("non-finite gradients passed to adam_step");
    opt.step += 1;
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
    for (const auto& name : params.names()) {
        Mat& p = params.at(name);
        const Mat& g = grads.at(name);
        Mat& m = opt.m.at(name);
        Mat& v = opt.v.at(name);
        m = opt.beta1 * m + (1.0 - opt.beta1) * g;
        v = opt.beta2 * v.array().matrix() +
            (1.0 - opt.beta2) * g.array().square().matrix();
        const auto m_hat = m.array() / bc1;
        const auto v_hat = v.array() / bc2;
        p.array() -= opt.lr * m_hat / (v_hat.sqrt() + opt.eps);
    }
}

double beta_at(std::int64_t epoch, const Schedule& sched) {
    sched.validate();
    if (epoch < 0 || epoch > sched.total_epochs)
        throw InvalidArgument("epoch out of schedule range");
    return std::min(1.0, static_cast<double>(epoch) /
                             static_cast<double>(sched.anneal_end_epoch));
}

TrainState init_train_state(const model::Dims& dims, std::uint64_t seed) {
    TrainState s;
    s.params = model::ParameterSet(dims, seed);
    s.opt = OptimizerState::init(s.params);
    s.seed = seed;
    return s;
}

void append_metrics_csv(const std::string& path,
                        const std::vector<EpochRecord>& records,
                        bool write_header) {
    std::ofstream out(path, write_header ? std::ios::trunc : std::ios::app);
    if (!out) throw IoError("cannot open metrics log: " + path);
    if (write_header) out << "epoch,beta,train_loss,val_loss,wall_clock_s\n";
    out.precision(12);
    for (const auto& r : records)
        out << r.epoch << ',' << r.beta << ',' << r.train_loss << ','
            << r.val_loss << ',' << r.wall_clock_s << '\n';
}

namespace {

double clip_gradients(model::ParameterSet& grads, double max_norm) {
    const double norm = std::sqrt(grads.squared_norm());
    if (norm > max_norm && norm > 0.0) {
        const double k = max_norm / norm;
        for (const auto& name : grads.names()) grads.at(name) *= k;
    }
    return norm;
}

double mean_validation_loss(const Dataset& val_set,
                            const model::ParameterSet& params, double beta,
                            std::uint64_t seed, const model::ElboOptions& opts) {
    if (val_set.empty()) return std::numeric_limits<double>::quiet_NaN();
    double total = 0.0;
    for (std::size_t i = 0; i < val_set.size(); ++i) {
        const auto& c = val_set[i].pair;
        total -= model::elbo(c.x, c.y, params, beta,
                             model::derive_seed(seed, i), opts)
                     .total;
    }
    return total / static_cast<double>(val_set.size());
}

}  // namespace

std::vector<EpochRecord> train(const Dataset& train_set, const Dataset& val_set,
                               TrainState& state, const TrainOptions& opts) {
    if (train_set.empty()) throw InvalidArgument("train set is empty");
    opts.sched.validate();
    const model::ElboOptions eopts{opts.strict_posterior};

    // Bucket chunks by T so batches share the sequence length.
    std::map<std::int64_t, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < train_set.size(); ++i)
        buckets[train_set[i].pair.x.rows()].push_back(i);

    const bool checkpoints = !opts.checkpoint_dir.empty();
    if (checkpoints) std::filesystem::create_directories(opts.checkpoint_dir);
    bool fresh_log = !opts.metrics_csv.empty() && state.epoch == 0;

    std::vector<EpochRecord> records;
    double best_val = std::numeric_limits<double>::infinity();
    const auto t0 = std::chrono::steady_clock::now();

    for (std::int64_t epoch = state.epoch; epoch < opts.sched.total_epochs;
         ++epoch) {
        const double beta = beta_at(epoch, opts.sched);
        std::mt19937_64 shuffle_rng(model::derive_seed(
            opts.seed ^ 0x8f1eb2d4a5c3e711ULL, static_cast<std::uint64_t>(epoch)));

        double loss_sum = 0.0;
        std::int64_t chunk_count = 0;
        std::uint64_t batch_counter = 0;
        const std::uint64_t epoch_seed =
            model::derive_seed(opts.seed, static_cast<std::uint64_t>(epoch));

        for (auto& [t_len, indices] : buckets) {
            std::vector<std::size_t> order = indices;
            std::shuffle(order.begin(), order.end(), shuffle_rng);
            for (std::size_t start = 0; start < order.size();
                 start += static_cast<std::size_t>(opts.sched.batch_size)) {
                const std::size_t end = std::min(
                    order.size(),
                    start + static_cast<std::size_t>(opts.sched.batch_size));
                std::vector<model::ChunkPair> batch;
                for (std::size_t i = start; i < end; ++i)
                    batch.push_back(train_set[order[i]].pair);
                if (batch.empty()) {
                    std::cerr << "warning: empty batch bucket T=" << t_len
                              << ", skipped\n";
                    continue;
                }
                auto [loss, grads] = model::loss_and_gradients(
                    batch, state.params, beta,
                    model::derive_seed(epoch_seed, batch_counter), eopts);
                clip_gradients(grads, opts.grad_clip_norm);
                adam_step(state.params, grads, state.opt);
                loss_sum += loss * static_cast<double>(batch.size());
                chunk_count += static_cast<std::int64_t>(batch.size());
                ++batch_counter;
            }
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.beta = beta;
        rec.train_loss = loss_sum / static_cast<double>(chunk_count);
        rec.val_loss = mean_validation_loss(
            val_set, state.params, beta,
            model::derive_seed(opts.seed ^ 0x517cc1b727220a95ULL,
                               static_cast<std::uint64_t>(epoch)),
            eopts);
        rec.wall_clock_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        records.push_back(rec);
        if (opts.on_epoch) opts.on_epoch(rec);

        state.epoch = epoch + 1;
        state.beta = beta;

        if (checkpoints) {
            const bool cadence =
                (epoch + 1) % opts.sched.checkpoint_every == 0 ||
                epoch + 1 == opts.sched.total_epochs;
            if (cadence)
                checkpoint::save_train_state(
                    opts.checkpoint_dir + "/last.ckpt", state);
            if (!std::isnan(rec.val_loss) && rec.val_loss < best_val) {
                best_val = rec.val_loss;
                checkpoint::save_train_state(
                    opts.checkpoint_dir + "/best.ckpt", state);
            }
        }
    }

    if (!opts.metrics_csv.empty()) {
        append_metrics_csv(opts.metrics_csv, records, fresh_log);
    }
    return records;
}

}  // namespace adssm::training
