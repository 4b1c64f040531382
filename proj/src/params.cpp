#include "adssm/params.hpp"

#include <cmath>
#include <random>

namespace adssm::model {

void Dims::validate() const {
    if (n_pp <= 0 || n_rr <= 0 || latent <= 0 || hidden <= 0 || attn_hidden <= 0)
        throw InvalidArgument("all model dimensions must be positive");
}

std::vector<std::string> parameter_names() {
    return ParameterSet(Dims::tiny(), 0).names();
}

void ParameterSet::add(const std::string& name, Eigen::Index rows,
                       Eigen::Index cols) {
    index_[name] = names_.size();
    names_.push_back(name);
    tensors_.push_back(Mat::Zero(rows, cols));
}

void ParameterSet::build_layout(const Dims& dims) {
    dims.validate();
    dims_ = dims;
    names_.clear();
    index_.clear();
    tensors_.clear();

    const int L = dims.latent, H = dims.hidden, A = dims.attn_hidden;
    const int zc = 2 * L;  // [z; c] with the context embedded to latent width

    add("score.W_x", L, dims.n_pp);
    add("score.W_s", A, zc);
    add("score.b_s", A, 1);
    add("score.v_s", A, 1);

    add("trans.W_g1", H, zc); add("trans.b_g1", H, 1);
    add("trans.W_g2", H, H);  add("trans.b_g2", H, 1);
    add("trans.W_g3", L, H);  add("trans.b_g3", L, 1);
    add("trans.W_d1", H, zc); add("trans.b_d1", H, 1);
    add("trans.W_d2", H, H);  add("trans.b_d2", H, 1);
    add("trans.W_d3", L, H);  add("trans.b_d3", L, 1);
    add("trans.W_mu", L, zc); add("trans.b_mu", L, 1);
    add("trans.W_var", L, L); add("trans.b_var", L, 1);

    add("emit.W_e1", H, L);        add("emit.b_e1", H, 1);
    add("emit.W_e2", H, H);        add("emit.b_e2", H, 1);
    add("emit.W_e3", dims.n_rr, H); add("emit.b_e3", dims.n_rr, 1);

    add("post.W_y", H, dims.n_rr);
    for (const char* dir : {"bwd", "fwd"}) {
        for (const char* gate : {"r", "u", "n"}) {
            const std::string p = std::string("post.") + dir + ".";
            add(p + "W_" + gate, H, H);
            add(p + "U_" + gate, H, H);
            add(p + "b_" + gate, H, 1);
        }
    }
    add("post.W_h", H, L);  add("post.b_h", H, 1);
    add("post.W_mu", L, H); add("post.b_mu", L, 1);
    add("post.W_var", L, H); add("post.b_var", L, 1);
    add("z_init", L, 1);
}

ParameterSet::ParameterSet(const Dims& dims, std::uint64_t seed) {
    build_layout(dims);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < tensors_.size(); ++i) {
        Mat& m = tensors_[i];
        if (m.cols() == 1 && names_[i] != "z_init") continue;  // biases start at 0
        const double bound = 1.0 / std::sqrt(static_cast<double>(m.cols()));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = dist(rng);
    }
    // Gate starts mostly closed so the transition leans linear early on.
    at("trans.b_g3").setConstant(-2.0);
}

void ParameterSet::define(const Dims& dims, const std::vector<std::string>& names) {
    build_layout(dims);
    if (names != names_)
        throw InvalidArgument("parameter name list does not match layout");
}

Mat& ParameterSet::at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw InvalidArgument("unknown parameter: " + name);
    return tensors_[it->second];
}

const Mat& ParameterSet::at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw InvalidArgument("unknown parameter: " + name);
    return tensors_[it->second];
}

ParameterSet ParameterSet::zeros_like() const {
    ParameterSet out;
    out.build_layout(dims_);
    return out;
}

std::size_t ParameterSet::scalar_count() const {
    std::size_t n = 0;
    for (const Mat& m : tensors_) n += static_cast<std::size_t>(m.size());
    return n;
}

double ParameterSet::squared_norm() const {
    double s = 0.0;
    for (const Mat& m : tensors_) s += m.squaredNorm();
    return s;
}

bool ParameterSet::all_finite() const {
    for (const Mat& m : tensors_)
        if (!m.allFinite()) return false;
    return true;
}

}  // namespace adssm::model
