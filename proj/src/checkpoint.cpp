#include "adssm/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "adssm/training.hpp"

namespace adssm::checkpoint {

namespace {

constexpr char kMagic[8] = {'A', 'D', 'S', 'S', 'M', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

// Raw little-endian writes; the build targets little-endian hosts.
template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("truncated checkpoint file");
    return v;
}

void put_tensor(std::ofstream& out, const std::string& name, const Mat& m) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint32_t>(out, 2);
    put<std::int64_t>(out, m.rows());
    put<std::int64_t>(out, m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
}

void get_tensor(std::ifstream& in, std::string& name, Mat& m) {
    const auto name_len = get<std::uint32_t>(in);
    name.resize(name_len);
    in.read(name.data(), name_len);
    const auto rank = get<std::uint32_t>(in);
    if (rank != 2) throw ParseError("unexpected tensor rank in checkpoint");
    const auto rows = get<std::int64_t>(in);
    const auto cols = get<std::int64_t>(in);
    if (rows < 0 || cols < 0 || rows * cols > (1LL << 32))
        throw ParseError("implausible tensor shape in checkpoint");
    m.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = get<double>(in);
}

void put_params(std::ofstream& out, const model::ParameterSet& params) {
    put<std::uint64_t>(out, params.size());
    for (const auto& name : params.names()) put_tensor(out, name, params.at(name));
}

void get_params_into(std::ifstream& in, model::ParameterSet& params) {
    const auto count = get<std::uint64_t>(in);
    if (count != params.size())
        throw ParseError("checkpoint tensor count does not match layout");
    std::string name;
    Mat m;
    for (std::uint64_t i = 0; i < count; ++i) {
        get_tensor(in, name, m);
        Mat& dst = params.at(name);
        if (dst.rows() != m.rows() || dst.cols() != m.cols())
            throw ParseError("checkpoint tensor shape mismatch for " + name);
        dst = m;
    }
}

void put_header(std::ofstream& out, const model::Dims& dims, std::uint32_t kind) {
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kVersion);
    put<std::uint32_t>(out, kind);  // 0 = params only, 1 = full train state
    put<std::int32_t>(out, dims.n_pp);
    put<std::int32_t>(out, dims.n_rr);
    put<std::int32_t>(out, dims.latent);
    put<std::int32_t>(out, dims.hidden);
    put<std::int32_t>(out, dims.attn_hidden);
}

model::Dims get_header(std::ifstream& in, std::uint32_t expected_kind) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ParseError("not an ADSSM checkpoint file");
    if (get<std::uint32_t>(in) != kVersion)
        throw ParseError("unsupported checkpoint version");
    if (get<std::uint32_t>(in) != expected_kind)
        throw ParseError("checkpoint kind mismatch (params vs train state)");
    model::Dims dims;
    dims.n_pp = get<std::int32_t>(in);
    dims.n_rr = get<std::int32_t>(in);
    dims.latent = get<std::int32_t>(in);
    dims.hidden = get<std::int32_t>(in);
    dims.attn_hidden = get<std::int32_t>(in);
    dims.validate();
    return dims;
}

}  // namespace

void save_params(const std::string& path, const model::ParameterSet& params) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    put_header(out, params.dims(), 0);
    put_params(out, params);
    if (!out) throw IoError("write failure on checkpoint: " + path);
}

model::ParameterSet load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read checkpoint: " + path);
    const model::Dims dims = get_header(in, 0);
    model::ParameterSet params(dims, 0);
    get_params_into(in, params);
    return params;
}

void save_train_state(const std::string& path,
                      const training::TrainState& state) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    put_header(out, state.params.dims(), 1);
    put_params(out, state.params);
    put<std::int64_t>(out, state.opt.step);
    put<double>(out, state.opt.lr);
    put<double>(out, state.opt.beta1);
    put<double>(out, state.opt.beta2);
    put<double>(out, state.opt.eps);
    put_params(out, state.opt.m);
    put_params(out, state.opt.v);
    put<std::int64_t>(out, state.epoch);
    put<double>(out, state.beta);
    put<std::uint64_t>(out, state.seed);
    if (!out) throw IoError("write failure on checkpoint: " + path);
}

training::TrainState load_train_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read checkpoint: " + path);
    const model::Dims dims = get_header(in, 1);
    training::TrainState state;
    state.params = model::ParameterSet(dims, 0);
    get_params_into(in, state.params);
    state.opt.step = get<std::int64_t>(in);
    state.opt.lr = get<double>(in);
    state.opt.beta1 = get<double>(in);
    state.opt.beta2 = get<double>(in);
    state.opt.eps = get<double>(in);
    state.opt.m = state.params.zeros_like();
    state.opt.v = state.params.zeros_like();
    get_params_into(in, state.opt.m);
    get_params_into(in, state.opt.v);
    state.epoch = get<std::int64_t>(in);
    state.beta = get<double>(in);
    state.seed = get<std::uint64_t>(in);
    return state;
}

}  // namespace adssm::checkpoint
