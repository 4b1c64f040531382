#include "adssm/ad.hpp"

#include <cmath>

namespace adssm::ad {

Var make_op(Tape& t, Mat value, std::function<void()> backprop) {
    t.nodes_.push_back(std::make_unique<Node>(std::move(value)));
    t.nodes_.back()->backprop = std::move(backprop);
    return Var{t.nodes_.back().get()};
}

void Tape::backward(Var loss) {
    if (loss.rows() != 1 || loss.cols() != 1)
        throw InvalidArgument("backward requires a scalar loss node");
    for (auto& n : nodes_) n->grad.setZero();
    loss.node->grad(0, 0) = 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it)
        if ((*it)->backprop) (*it)->backprop();
}

Var matmul(Tape& t, Var a, Var b) {
    if (a.cols() != b.rows()) throw InvalidArgument("matmul shape mismatch");
    Node *an = a.node, *bn = b.node;
    Var out = make_op(t, an->value * bn->value, nullptr);
    Node* on = out.node;
    on->backprop = [an, bn, on] {
        an->grad.noalias() += on->grad * bn->value.transpose();
        bn->grad.noalias() += an->value.transpose() * on->grad;
    };
    return out;
}

Var add(Tape& t, Var a, Var b) {
    Node *an = a.node, *bn = b.node;
    Var out = make_op(t, an->value + bn->value, nullptr);
    Node* on = out.node;
    on->backprop = [an, bn, on] {
        an->grad += on->grad;
        bn->grad += on->grad;
    };
    return out;
}

Var sub(Tape& t, Var a, Var b) {
    Node *an = a.node, *bn = b.node;
    Var out = make_op(t, an->value - bn->value, nullptr);
    Node* on = out.node;
    on->backprop = [an, bn, on] {
        an->grad += on->grad;
        bn->grad -= on->grad;
    };
    return out;
}

Var cmul(Tape& t, Var a, Var b) {
    Node *an = a.node, *bn = b.node;
    Var out = make_op(t, (an->value.array() * bn->value.array()).matrix(), nullptr);
    Node* on = out.node;
    on->backprop = [an, bn, on] {
        an->grad.array() += on->grad.array() * bn->value.array();
        bn->grad.array() += on->grad.array() * an->value.array();
    };
    return out;
}

Var cdiv(Tape& t, Var a, Var b) {
    Node *an = a.node, *bn = b.node;
    Var out = make_op(t, (an->value.array() / bn->value.array()).matrix(), nullptr);
    Node* on = out.node;
    on->backprop = [an, bn, on] {
        an->grad.array() += on->grad.array() / bn->value.array();
        bn->grad.array() -= on->grad.array() * an->value.array() /
                            (bn->value.array() * bn->value.array());
    };
    return out;
}

Var vstack(Tape& t, Var a, Var b) {
    if (a.cols() != b.cols()) throw InvalidArgument("vstack column mismatch");
    Mat v(a.rows() + b.rows(), a.cols());
    v << a.value(), b.value();
    Node *an = a.node, *bn = b.node;
    Var out = make_op(t, std::move(v), nullptr);
    Node* on = out.node;
    on->backprop = [an, bn, on] {
        an->grad += on->grad.topRows(an->value.rows());
        bn->grad += on->grad.bottomRows(bn->value.rows());
    };
    return out;
}

Var vstack_list(Tape& t, const std::vector<Var>& rows) {
    if (rows.empty()) throw InvalidArgument("vstack_list needs at least one entry");
    Eigen::Index total = 0;
    for (auto r : rows) {
        if (r.cols() != 1) throw InvalidArgument("vstack_list expects column vectors");
        total += r.rows();
    }
    Mat v(total, 1);
    Eigen::Index at = 0;
    for (auto r : rows) {
        v.block(at, 0, r.rows(), 1) = r.value();
        at += r.rows();
    }
    std::vector<Node*> srcs;
    for (auto r : rows) srcs.push_back(r.node);
    Var out = make_op(t, std::move(v), nullptr);
    Node* on = out.node;
    on->backprop = [srcs, on] {
        Eigen::Index at = 0;
        for (Node* s : srcs) {
            s->grad += on->grad.block(at, 0, s->value.rows(), 1);
            at += s->value.rows();
        }
    };
    return out;
}

Var transpose(Tape& t, Var a) {
    Node* an = a.node;
    Var out = make_op(t, an->value.transpose(), nullptr);
    Node* on = out.node;
    on->backprop = [an, on] { an->grad += on->grad.transpose(); };
    return out;
}

Var hstack(Tape& t, const std::vector<Var>& cols) {
    if (cols.empty()) throw InvalidArgument("hstack needs at least one column");
    Mat v(cols[0].rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) v.col(i) = cols[i].value();
    std::vector<Node*> srcs;
    for (auto c : cols) srcs.push_back(c.node);
    Var out = make_op(t, std::move(v), nullptr);
    Node* on = out.node;
    on->backprop = [srcs, on] {
        for (std::size_t i = 0; i < srcs.size(); ++i)
            srcs[i]->grad += on->grad.col(static_cast<Eigen::Index>(i));
    };
    return out;
}

Var sigmoid(Tape& t, Var a) {
    Node* an = a.node;
    Mat v = (1.0 / (1.0 + (-an->value.array()).exp())).matrix();
    Var out = make_op(t, std::move(v), nullptr);
    Node* on = out.node;
    on->backprop = [an, on] {
        an->grad.array() +=
            on->grad.array() * on->value.array() * (1.0 - on->value.array());
    };
    return out;
}

Var tanh(Tape& t, Var a) {
    Node* an = a.node;
    Var out = make_op(t, an->value.array().tanh().matrix(), nullptr);
    Node* on = out.node;
    on->backprop = [an, on] {
        an->grad.array() +=
            on->grad.array() * (1.0 - on->value.array() * on->value.array());
    };
    return out;
}

Var relu(Tape& t, Var a) {
    Node* an = a.node;
    Var out = make_op(t, an->value.array().max(0.0).matrix(), nullptr);
    Node* on = out.node;
    on->backprop = [an, on] {
        an->grad.array() +=
            on->grad.array() * (an->value.array() > 0.0).cast<double>();
    };
    return out;
}

Var softplus(Tape& t, Var a) {
    Node* an = a.node;
    // log1p(exp(x)) with the large-x branch to avoid overflow.
    Mat v = an->value.unaryExpr([](double x) {
        return x > 30.0 ? x : std::log1p(std::exp(x));
    });
    Var out = make_op(t, std::move(v), nullptr);
    Node* on = out.node;
    on->backprop = [an, on] {
        an->grad.array() +=
            on->grad.array() / (1.0 + (-an->value.array()).exp());
    };
    return out;
}

Var sqrt(Tape& t, Var a) {
    Node* an = a.node;
    Var out = make_op(t, an->value.array().sqrt().matrix(), nullptr);
    Node* on = out.node;
    on->backprop = [an, on] {
        an->grad.array() += on->grad.array() * 0.5 / on->value.array();
    };
    return out;
}

Var log(Tape& t, Var a) {
    Node* an = a.node;
    Var out = make_op(t, an->value.array().log().matrix(), nullptr);
    Node* on = out.node;
    on->backprop = [an, on] {
        an->grad.array() += on->grad.array() / an->value.array();
    };
    return out;
}

Var square(Tape& t, Var a) {
    Node* an = a.node;
    Var out = make_op(t, an->value.array().square().matrix(), nullptr);
    Node* on = out.node;
    on->backprop = [an, on] {
        an->grad.array() += on->grad.array() * 2.0 * an->value.array();
    };
    return out;
}

Var softmax(Tape& t, Var a) {
    if (a.cols() != 1) throw InvalidArgument("softmax expects a column vector");
    Node* an = a.node;
    Eigen::ArrayXd e = (an->value.array() - an->value.maxCoeff()).exp();
    Mat v = (e / e.sum()).matrix();
    Var out = make_op(t, std::move(v), nullptr);
    Node* on = out.node;
    on->backprop = [an, on] {
        const auto y = on->value.array();
        const auto g = on->grad.array();
        const double dot = (y * g).sum();
        an->grad.array() += y * (g - dot);
    };
    return out;
}

Var sum(Tape& t, Var a) {
    Node* an = a.node;
    Var out = make_op(t, Mat::Constant(1, 1, an->value.sum()), nullptr);
    Node* on = out.node;
    on->backprop = [an, on] { an->grad.array() += on->grad(0, 0); };
    return out;
}

Var scale(Tape& t, Var a, double k) {
    Node* an = a.node;
    Var out = make_op(t, an->value * k, nullptr);
    Node* on = out.node;
    on->backprop = [an, on, k] { an->grad += on->grad * k; };
    return out;
}

Var add_const(Tape& t, Var a, double k) {
    Node* an = a.node;
    Var out = make_op(t, (an->value.array() + k).matrix(), nullptr);
    Node* on = out.node;
    on->backprop = [an, on] { an->grad += on->grad; };
    return out;
}

}  // namespace adssm::ad
