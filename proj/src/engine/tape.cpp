#include "mlenv/engine/tape.hpp"

#include <atomic>
#include <stdexcept>

namespace mlenv::engine {

namespace {

std::atomic<std::uint64_t> next_tape_id{1};
thread_local std::vector<Tape*> tape_stack;

}  // namespace

Tape::Tape() : id_(next_tape_id.fetch_add(1)) {
    tape_stack.push_back(this);
}

Tape::~Tape() {
    tape_stack.pop_back();
}

Tape* Tape::active() {
    return tape_stack.empty() ? nullptr : tape_stack.back();
}

void Tape::record(std::string op_name, std::function<void()> backward_fn) {
    nodes_.push_back(Node{std::move(op_name), std::move(backward_fn)});
}

void backward(const Tensor& loss, Tape& tape) {
    if (!loss.is_scalar()) {
        throw std::logic_error("backward() needs a scalar loss, got shape " +
                               shape_str(loss.shape()));
    }
    if (loss.impl()->tape_id != tape.id()) {
        throw std::logic_error("backward() called with a loss that was not recorded on this tape");
    }
    double one = 1.0;
    loss.impl()->ensure_grad();
    loss.impl()->grad[0] += one;
    for (auto it = tape.nodes_.rbegin(); it != tape.nodes_.rend(); ++it) {
        it->backward_fn();
    }
}

}  // namespace mlenv::engine
