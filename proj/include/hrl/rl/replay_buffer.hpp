#pragma once

#include <cstddef>
#include <vector>

#include "hrl/error.hpp"
#include "hrl/rl/q_learning.hpp"

namespace hrl::rl {

/// Fixed-capacity ring of experiences. Once full, each push overwrites the
/// oldest entry.
template <typename T>
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        require(capacity >= 1, "replay buffer capacity must be >= 1");
        storage_.reserve(capacity);
    }

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return storage_.size(); }
    bool empty() const noexcept { return storage_.empty(); }

    void push(T item) {
        if (storage_.size() < capacity_) {
            storage_.push_back(std::move(item));
        } else {
            storage_[cursor_] = std::move(item);
        }
        cursor_ = (cursor_ + 1) % capacity_;
    }

    /// i-th entry counted from the oldest.
    const T& operator[](std::size_t i) const {
        if (i >= storage_.size()) throw LookupError("replay buffer index out of range");
        if (storage_.size() < capacity_) return storage_[i];
        return storage_[(cursor_ + i) % capacity_];
    }

    const T& sample(Rng& rng) const {
        if (storage_.empty()) throw InvalidArgument("cannot sample from an empty replay buffer");
        return storage_[uniform_index(rng, storage_.size())];
    }

private:
    std::size_t capacity_;
    std::size_t cursor_ = 0;
    std::vector<T> storage_;
};

} // namespace hrl::rl
