#ifndef ADSSM_PARAMS_HPP
#define ADSSM_PARAMS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "adssm/types.hpp"

namespace adssm::model {

struct Dims {
    int n_pp = 90;
    int n_rr = 90;
    int latent = 128;
    int hidden = 256;
    int attn_hidden = 128;

    void validate() const;
    bool operator==(const Dims&) const = default;

    static Dims tiny() { return Dims{8, 8, 4, 6, 5}; }
};

// All trainable tensors in a fixed iteration order, addressable by name.
// Column vectors are n x 1 matrices.
class ParameterSet {
public:
    ParameterSet() = default;
    ParameterSet(const Dims& dims, std::uint64_t seed);  // random init

    Mat& at(const std::string& name);
    const Mat& at(const std::string& name) const;
    bool has(const std::string& name) const { return index_.count(name) > 0; }

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const Dims& dims() const { return dims_; }

    // Same-shaped zero set, for gradients and optimizer moments.
    ParameterSet zeros_like() const;

    std::size_t scalar_count() const;
    double squared_norm() const;
    bool all_finite() const;

    // Used by checkpoint io and tests that rebuild a set tensor by tensor.
    void define(const Dims& dims, const std::vector<std::string>& names);

private:
    Dims dims_;
    std::vector<std::string> names_;
    std::map<std::string, std::size_t> index_;
    std::vector<Mat> tensors_;

    void add(const std::string& name, Eigen::Index rows, Eigen::Index cols);
    void build_layout(const Dims& dims);
    friend struct ParameterLayout;
};

// Deterministic tensor layout shared by init, checkpointing, and the
// gradient tape.
std::vector<std::string> parameter_names();

}  // namespace adssm::model

#endif
