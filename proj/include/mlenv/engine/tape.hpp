#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mlenv/engine/tensor.hpp"

namespace mlenv::engine {

/// Records the backward pass of every differentiable op executed while it is
/// the innermost live Tape on the current thread. Construction activates the
/// tape, destruction deactivates it (tapes nest like scopes). backward() runs
/// the recorded closures in reverse order.
class Tape {
public:
    Tape();
    ~Tape();

    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;
    Tape(Tape&&) = delete;
    Tape& operator=(Tape&&) = delete;

    std::uint64_t id() const { return id_; }
    std::size_t num_nodes() const { return nodes_.size(); }

    void record(std::string op_name, std::function<void()> backward_fn);

    /// Innermost live tape on this thread, or nullptr outside any tape scope.
    static Tape* active();

private:
    friend void backward(const Tensor& loss, Tape& tape);

    struct Node {
        std::string op_name;
        std::function<void()> backward_fn;
    };

    std::uint64_t id_;
    std::vector<Node> nodes_;
};

/// Seeds d(loss)/d(loss) = 1 and propagates gradients through every node the
/// tape recorded, newest first. The loss must be a scalar produced on `tape`.
void backward(const Tensor& loss, Tape& tape);

}  // namespace mlenv::engine
