#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>
#include <vector>

#include "archipelago/errors.hpp"
#include "archipelago/trajectory.hpp"

namespace archipelago {

/// Bounded per-species ring of trajectory segments. Enqueue never blocks:
/// at capacity the oldest unconsumed segment is overwritten. Dequeue hands
/// out complete batches only, in FIFO order of the surviving segments.
/// Many producers, one consumer.
class TrajectoryQueue {
public:
    TrajectoryQueue(int species_id, std::size_t capacity)
        : species_id_(species_id), capacity_(capacity) {
        if (capacity == 0) {
            throw ArgumentError("TrajectoryQueue: capacity must be positive");
        }
    }

    [[nodiscard]] int species_id() const { return species_id_; }
    [[nodiscard]] std::size_t capacity() const { return capacity_; }

    [[nodiscard]] std::size_t size() const {
        std::lock_guard lock(mu_);
        return ring_.size();
    }

    void enqueue(Trajectory segment) {
        if (segment.species_id != species_id_) {
            throw DataIntegrityError("TrajectoryQueue: segment species mismatch");
        }
        {
            std::lock_guard lock(mu_);
            if (ring_.size() == capacity_) ring_.pop_front();
            ring_.push_back(std::move(segment));
        }
        cv_.notify_all();
    }

    /// Non-blocking: remove and return exactly batch_size segments, or leave
    /// the queue untouched and return false.
    bool try_dequeue_batch(std::size_t batch_size, std::vector<Trajectory>& out) {
        std::lock_guard lock(mu_);
        if (ring_.size() < batch_size) return false;
        take(batch_size, out);
        return true;
    }

    /// Blocking variant for the parallel scheduler; returns false if the
    /// queue closes before a full batch accumulates.
    bool dequeue_batch(std::size_t batch_size, std::vector<Trajectory>& out) {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return ring_.size() >= batch_size || closed_; });
        if (ring_.size() < batch_size) return false;
        take(batch_size, out);
        return true;
    }

    void close() {
        {
            std::lock_guard lock(mu_);
            closed_ = true;
        }
        cv_.notify_all();
    }

    /// FIFO copy of the waiting segments; lets checkpoints record queue
    /// contents without disturbing the consumer.
    [[nodiscard]] std::vector<Trajectory> snapshot() const {
        std::lock_guard lock(mu_);
        return {ring_.begin(), ring_.end()};
    }

private:
    void take(std::size_t batch_size, std::vector<Trajectory>& out) {
        out.clear();
        out.reserve(batch_size);
        for (std::size_t i = 0; i < batch_size; ++i) {
            out.push_back(std::move(ring_.front()));
            ring_.pop_front();
        }
    }

    int species_id_;
    std::size_t capacity_;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Trajectory> ring_;
    bool closed_ = false;
};

}  // namespace archipelago
