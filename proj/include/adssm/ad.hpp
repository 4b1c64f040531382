#ifndef ADSSM_AD_HPP
#define ADSSM_AD_HPP

#include <functional>
#include <memory>
#include <vector>

#include "adssm/types.hpp"

namespace adssm::ad {

// Reverse-mode tape over dense matrices (column vectors are n x 1).
// Build the graph with the free functions below, then call
// Tape::backward on a 1x1 scalar node; leaf gradients accumulate in
// Node::grad.

struct Node {
    Mat value;
    Mat grad;
    std::function<void()> backprop;  // empty for leaves/constants

    explicit Node(Mat v) : value(std::move(v)) {
        grad = Mat::Zero(value.rows(), value.cols());
    }
};

class Tape;

struct Var {
    Node* node = nullptr;

    const Mat& value() const { return node->value; }
    const Mat& grad() const { return node->grad; }
    Eigen::Index rows() const { return node->value.rows(); }
    Eigen::Index cols() const { return node->value.cols(); }
};

class Tape {
public:
    Var leaf(Mat v) {
        nodes_.push_back(std::make_unique<Node>(std::move(v)));
        return Var{nodes_.back().get()};
    }

    Var constant(Mat v) { return leaf(std::move(v)); }

    Var scalar(double v) { return leaf(Mat::Constant(1, 1, v)); }

    // Runs backprop from a 1x1 loss node in reverse insertion order.
    void backward(Var loss);

    std::size_t size() const { return nodes_.size(); }

private:
    friend Var make_op(Tape& t, Mat value, std::function<void()> backprop);
    std::vector<std::unique_ptr<Node>> nodes_;
};

Var make_op(Tape& t, Mat value, std::function<void()> backprop);

Var matmul(Tape& t, Var a, Var b);
Var add(Tape& t, Var a, Var b);
Var sub(Tape& t, Var a, Var b);
Var cmul(Tape& t, Var a, Var b);  // elementwise
Var cdiv(Tape& t, Var a, Var b);  // elementwise
Var vstack(Tape& t, Var a, Var b);
Var vstack_list(Tape& t, const std::vector<Var>& rows);  // stack 1x1 scalars
Var hstack(Tape& t, const std::vector<Var>& cols);
Var transpose(Tape& t, Var a);
Var sigmoid(Tape& t, Var a);
Var tanh(Tape& t, Var a);
Var relu(Tape& t, Var a);
Var softplus(Tape& t, Var a);
Var sqrt(Tape& t, Var a);
Var log(Tape& t, Var a);
Var square(Tape& t, Var a);
Var softmax(Tape& t, Var a);      // column vector
Var sum(Tape& t, Var a);          // all entries -> 1x1
Var scale(Tape& t, Var a, double k);
Var add_const(Tape& t, Var a, double k);

}  // namespace adssm::ad

#endif
