#include <chrono>
#include <thread>
#include <vector>

#include <doctest.h>

#include "archipelago/errors.hpp"
#include "archipelago/queue.hpp"
#include "archipelago/trajectory.hpp"

using namespace archipelago;

namespace {

/// Minimal segment whose island_id doubles as a sequence tag.
Trajectory tagged(int species_id, int tag) {
    Trajectory t;
    t.species_id = species_id;
    t.island_id = tag;
    t.observations.emplace_back(1, 1);
    t.last_rewards.push_back(0.0);
    t.actions.push_back(0);
    t.behavior_logp.push_back(-1.0);
    t.rewards.push_back(0.0);
    return t;
}

}  // namespace

TEST_CASE("construction and species guard") {
    CHECK_THROWS_AS(TrajectoryQueue(0, 0), ArgumentError);
    TrajectoryQueue q(3, 4);
    CHECK(q.species_id() == 3);
    CHECK(q.capacity() == 4);
    CHECK(q.size() == 0);
    CHECK_THROWS_AS(q.enqueue(tagged(2, 0)), DataIntegrityError);
    CHECK(q.size() == 0);
}

TEST_CASE("overflow drops the oldest segment") {
    TrajectoryQueue q(0, 4);
    for (int i = 0; i < 6; ++i) q.enqueue(tagged(0, i));
    CHECK(q.size() == 4);
    const std::vector<Trajectory> held = q.snapshot();
    REQUIRE(held.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(held[i].island_id == i + 2);
    // The snapshot did not consume anything.
    CHECK(q.size() == 4);
}

TEST_CASE("try_dequeue_batch is all-or-nothing and FIFO") {
    TrajectoryQueue q(0, 8);
    std::vector<Trajectory> out;
    CHECK_FALSE(q.try_dequeue_batch(1, out));
    for (int i = 0; i < 5; ++i) q.enqueue(tagged(0, i));
    CHECK_FALSE(q.try_dequeue_batch(6, out));
    CHECK(q.size() == 5);
    REQUIRE(q.try_dequeue_batch(3, out));
    REQUIRE(out.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(out[i].island_id == i);
    CHECK(q.size() == 2);
    REQUIRE(q.try_dequeue_batch(2, out));
    CHECK(out[0].island_id == 3);
    CHECK(out[1].island_id == 4);
    CHECK(q.size() == 0);
}

TEST_CASE("dequeue_batch blocks until a batch or close") {
    TrajectoryQueue q(0, 16);
    std::vector<Trajectory> out;

    std::thread producer([&q] {
        for (int i = 0; i < 4; ++i) {
            std::this_thread::sleep_for(std::chrono::milliseconds(2));
            q.enqueue(tagged(0, i));
        }
    });
    REQUIRE(q.dequeue_batch(4, out));
    producer.join();
    REQUIRE(out.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(out[i].island_id == i);

    std::thread closer([&q] {
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
        q.close();
    });
    CHECK_FALSE(q.dequeue_batch(1, out));
    closer.join();
}

TEST_CASE("a closed queue still serves complete batches") {
    TrajectoryQueue q(0, 8);
    for (int i = 0; i < 3; ++i) q.enqueue(tagged(0, i));
    q.close();
    std::vector<Trajectory> out;
    REQUIRE(q.dequeue_batch(3, out));
    CHECK(out.size() == 3);
    CHECK_FALSE(q.dequeue_batch(1, out));
}
