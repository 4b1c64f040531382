#include <cmath>
#include <random>

#include "adssm/translate.hpp"
#include "doctest.h"

using namespace adssm;
using model::Dims;
using model::ParameterSet;

namespace {

IntervalSequence make_sequence(std::int64_t steps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    IntervalSequence seq;
    seq.segments = Mat(steps, Dims::tiny().n_pp);
    for (std::int64_t t = 0; t < steps; ++t) {
        for (int c = 0; c < Dims::tiny().n_pp; ++c) seq.segments(t, c) = unit(rng);
        seq.original_lengths.push_back(90 + static_cast<std::int64_t>(t));
    }
    seq.kind = IntervalKind::PP;
    seq.chunk_id = "chunk";
    seq.norm = {1.0, 0.0, true};
    return seq;
}

}  // namespace

TEST_CASE("mean mode is deterministic and ignores the seed") {
    ParameterSet p(Dims::tiny(), 3);
    const auto seq = make_sequence(4, 5);
    const auto a = translate::translate_chunk(seq, p, translate::Mode::Mean, 0,
                                              11, 125.0);
    const auto b = translate::translate_chunk(seq, p, translate::Mode::Mean, 0,
                                              99, 125.0);
    CHECK(a.ecg_mean.samples == b.ecg_mean.samples);
    CHECK(a.per_interval_mean == b.per_interval_mean);
    CHECK(a.ecg_samples.empty());
    CHECK(a.ecg_mean.label == SignalKind::ECG);
    CHECK(a.ecg_mean.sample_rate_hz == 125.0);
}

TEST_CASE("reassembled length is the sum of the interval lengths") {
    ParameterSet p(Dims::tiny(), 7);
    const auto seq = make_sequence(5, 9);
    const auto t = translate::translate_chunk(seq, p, translate::Mode::Mean, 0,
                                              1, 125.0);
    std::int64_t expected = 0;
    for (auto len : seq.original_lengths) expected += len;
    CHECK(static_cast<std::int64_t>(t.ecg_mean.samples.size()) == expected);
    CHECK(t.pp_lengths_used == seq.original_lengths);
}

TEST_CASE("rollout attention rows sum to one") {
    ParameterSet p(Dims::tiny(), 13);
    const auto seq = make_sequence(6, 15);
    const auto t = translate::translate_chunk(seq, p, translate::Mode::Mean, 0,
                                              1, 125.0);
    REQUIRE(t.attention.rows() == 6);
    REQUIRE(t.attention.cols() == 6);
    for (int r = 0; r < 6; ++r)
        CHECK(t.attention.row(r).sum() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("draws collapse onto the mean when emission ignores the latent") {
    ParameterSet p(Dims::tiny(), 17);
    p.at("emit.W_e3").setZero();
    const auto seq = make_sequence(3, 19);
    const auto t = translate::translate_chunk(seq, p, translate::Mode::Sample,
                                              20, 23, 125.0);
    REQUIRE(t.ecg_samples.size() == 20);
    for (const auto& draw : t.ecg_samples) CHECK(draw == t.ecg_mean.samples);

    const auto band = translate::uncertainty_band(t, 125.0);
    for (std::size_t i = 0; i < band.lower.samples.size(); ++i)
        CHECK(band.upper.samples[i] - band.lower.samples[i] == 0.0);
}

TEST_CASE("each draw reproduces a manual rollout with its derived seed") {
    ParameterSet p(Dims::tiny(), 29);
    auto seq = make_sequence(3, 31);
    // Keep the intervals at their modeled length so reassembly is a copy.
    for (auto& len : seq.original_lengths) len = Dims::tiny().n_rr;
    const std::uint64_t seed = 37;
    const auto t = translate::translate_chunk(seq, p, translate::Mode::Sample,
                                              4, seed, 125.0,
                                              /*denormalize=*/false);

    for (int d = 0; d < 4; ++d) {
        const Mat eps = model::draw_eps(
            model::derive_seed(seed, static_cast<std::uint64_t>(d)), 3,
            Dims::tiny().latent);
        Vec z_prev = p.at("z_init");
        std::vector<double> manual;
        for (int step = 0; step < 3; ++step) {
            const auto attn = model::attend(z_prev, seq.segments, p);
            const auto prior = model::transition(z_prev, attn.context, p);
            Vec z = prior.mean +
                    (prior.var.array().sqrt() * eps.row(step).transpose().array())
                        .matrix();
            const Vec y = model::emit(z, p);
            for (int c = 0; c < Dims::tiny().n_rr; ++c) manual.push_back(y(c));
            z_prev = z;
        }
        const auto& draw = t.ecg_samples[static_cast<std::size_t>(d)];
        REQUIRE(draw.size() == manual.size());
        for (std::size_t i = 0; i < manual.size(); ++i)
            CHECK(draw[i] == doctest::Approx(manual[i]).epsilon(1e-12));
    }
}

TEST_CASE("denormalization maps through the stored chunk scale") {
    ParameterSet p(Dims::tiny(), 41);
    auto seq = make_sequence(2, 43);
    seq.norm = {0.5, 1.25, true};
    const auto raw = translate::translate_chunk(seq, p, translate::Mode::Mean, 0,
                                                1, 125.0, false);
    const auto mapped = translate::translate_chunk(seq, p, translate::Mode::Mean,
                                                   0, 1, 125.0, true);
    REQUIRE(raw.ecg_mean.samples.size() == mapped.ecg_mean.samples.size());
    for (std::size_t i = 0; i < raw.ecg_mean.samples.size(); ++i)
        CHECK(mapped.ecg_mean.samples[i] ==
              doctest::Approx(raw.ecg_mean.samples[i] * 0.5 + 1.25)
                  .epsilon(1e-12));
}

TEST_CASE("uncertainty band brackets a symmetric two-point spread") {
    translate::Translation t;
    const std::vector<double> mean = {0.0, 1.0, -2.0};
    const double delta = 0.25;
    for (int d = 0; d < 10; ++d) {
        std::vector<double> hi = mean, lo = mean;
        for (auto& v : hi) v += delta;
        for (auto& v : lo) v -= delta;
        t.ecg_samples.push_back(hi);
        t.ecg_samples.push_back(lo);
    }
    const auto band = translate::uncertainty_band(t, 125.0);
    for (std::size_t i = 0; i < mean.size(); ++i) {
        CHECK(band.upper.samples[i] - band.lower.samples[i] ==
              doctest::Approx(2.0 * delta).epsilon(1e-12));
        CHECK(band.lower.samples[i] <= mean[i]);
        CHECK(band.upper.samples[i] >= mean[i]);
    }
}

TEST_CASE("translate and band validate their inputs") {
    ParameterSet p(Dims::tiny(), 47);
    IntervalSequence empty;
    empty.segments = Mat(0, Dims::tiny().n_pp);
    CHECK_THROWS_AS(translate::translate_chunk(empty, p, translate::Mode::Mean,
                                               0, 1, 125.0),
                    InvalidArgument);

    auto seq = make_sequence(2, 49);
    CHECK_THROWS_AS(translate::translate_chunk(seq, p, translate::Mode::Sample,
                                               0, 1, 125.0),
                    InvalidArgument);

    seq.original_lengths.pop_back();
    CHECK_THROWS_AS(translate::translate_chunk(seq, p, translate::Mode::Mean, 0,
                                               1, 125.0),
                    InvalidArgument);

    ParameterSet bad(Dims::tiny(), 51);
    bad.at("z_init")(0, 0) = std::numeric_limits<double>::infinity();
    const auto ok = make_sequence(2, 53);
    CHECK_THROWS_AS(translate::translate_chunk(ok, bad, translate::Mode::Mean,
                                               0, 1, 125.0),
                    NumericError);

    translate::Translation few;
    few.ecg_samples.assign(19, std::vector<double>{0.0});
    CHECK_THROWS_AS(translate::uncertainty_band(few, 125.0), InvalidArgument);

    translate::Translation ragged;
    ragged.ecg_samples.assign(20, std::vector<double>{0.0, 1.0});
    ragged.ecg_samples.back() = {0.0};
    CHECK_THROWS_AS(translate::uncertainty_band(ragged, 125.0), InvalidArgument);
}
