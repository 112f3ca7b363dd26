#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <random>

#include "panjoin/llat.hpp"

using namespace panjoin;

namespace {

std::vector<Tuple> drain_chain(const Llat& t, std::uint32_t partition) {
    std::vector<Tuple> out;
    for (auto c = t.scan_partition(partition); !c.done(); c.next()) {
        out.push_back(c.get());
    }
    return out;
}

}  // namespace

TEST_CASE("entry capacity uses ceiling") {
    CHECK(LlatConfig{4, 16, 1.25}.entry_capacity() == 5);
    CHECK(LlatConfig{4, 16, 1.0}.entry_capacity() == 4);
    CHECK(LlatConfig{3, 10, 1.1}.entry_capacity() == 4);  // ceil(3.666)
    CHECK(LlatConfig{8, 4, 1.25}.entry_capacity() == 1);
}

TEST_CASE("filling one entry links a reserved entry") {
    auto t = Llat::for_partitions({4, 16, 1.25});
    REQUIRE(t.entry_capacity() == 5);
    for (std::uint32_t i = 0; i < 5; ++i) {
        t.insert(0, {i, i});
    }
    CHECK(t.entry_next(0) == 4);
    CHECK(t.ptr_g() == 5);
    CHECK(t.size() == 5);
}

TEST_CASE("single insert leaves ptr_g untouched") {
    auto t = Llat::for_partitions({4, 16, 1.25});
    t.insert(2, {1, 100});
    CHECK(t.ptr_g() == 4);
    CHECK(t.entry_live(2) == 1);
}

TEST_CASE("one partition absorbs the whole subwindow") {
    auto t = Llat::for_partitions({4, 16, 1.25});
    for (std::uint32_t i = 0; i < 16; ++i) {
        t.insert(0, {i, i * 10});
    }
    CHECK(t.size() == 16);
    // chain 0 -> 4 -> 5 -> 6 holding 5 + 5 + 5 + 1 tuples
    CHECK(t.entry_next(0) == 4);
    CHECK(t.entry_next(4) == 5);
    CHECK(t.entry_next(5) == 6);
    CHECK(t.entry_next(6) == Llat::npos);
    CHECK(t.entry_live(0) == 5);
    CHECK(t.entry_live(4) == 5);
    CHECK(t.entry_live(5) == 5);
    CHECK(t.entry_live(6) == 1);
    CHECK(t.ptr_g() == 7);

    CHECK_THROWS_AS(t.insert(0, {99, 0}), CapacityExceededError);

    SUBCASE("scan yields insertion order") {
        auto scanned = drain_chain(t, 0);
        REQUIRE(scanned.size() == 16);
        for (std::uint32_t i = 0; i < 16; ++i) {
            CHECK(scanned[i].key == i);
        }
    }

    SUBCASE("expirations return insertion order") {
        for (std::uint32_t i = 0; i < 16; ++i) {
            CHECK(t.expire_one(0).key == i);
        }
        CHECK(t.size() == 0);
        CHECK_THROWS_AS(t.expire_one(0), EmptyPartitionError);
    }
}

TEST_CASE("expire is FIFO per partition") {
    auto t = Llat::for_partitions({4, 16, 1.25});
    t.insert(1, {7, 70});
    t.insert(1, {8, 80});
    CHECK(t.expire_one(1).key == 7);
    CHECK(t.expire_one(1).key == 8);
    CHECK_THROWS_AS(t.expire_one(1), EmptyPartitionError);
}

TEST_CASE("expire on an empty partition throws") {
    auto t = Llat::for_partitions({4, 16, 1.25});
    CHECK_THROWS_AS(t.expire_one(3), EmptyPartitionError);
}

TEST_CASE("scan of an empty partition is empty") {
    auto t = Llat::for_partitions({4, 16, 1.25});
    CHECK(drain_chain(t, 0).empty());
}

TEST_CASE("scan of a single entry preserves order") {
    auto t = Llat::for_partitions({4, 16, 1.25});
    t.insert(2, {1, 5});
    t.insert(2, {2, 3});
    auto scanned = drain_chain(t, 2);
    REQUIRE(scanned.size() == 2);
    CHECK(scanned[0].key == 1);
    CHECK(scanned[1].key == 2);
}

TEST_CASE("storage overhead formula") {
    CHECK(llat_storage_overhead({4, 16, 1.25}) == 1.5);
    CHECK(llat_storage_overhead({4, 16, 1.0}) == 1.0);
    CHECK(llat_storage_overhead({4, 16, 1.10}) == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("randomized stress never exceeds 2P entries and mirrors a FIFO oracle") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        std::uniform_int_distribution<std::uint32_t> pcount(1, 16);
        const std::uint32_t P = pcount(rng);
        std::uniform_int_distribution<std::size_t> ncap(1, 256);
        const std::size_t n_sub = ncap(rng);
        std::uniform_real_distribution<double> sdist(1.01, 1.5);
        auto t = Llat::for_partitions({P, n_sub, sdist(rng)});

        std::vector<std::deque<Tuple>> oracle(P);
        std::uniform_int_distribution<std::uint32_t> pdist(0, P - 1);
        std::bernoulli_distribution flood(0.2);
        const bool single_partition_flood = flood(rng);
        std::size_t inserted = 0;

        std::bernoulli_distribution do_expire(0.25);
        while (inserted < n_sub) {
            const std::uint32_t p = single_partition_flood ? 0 : pdist(rng);
            if (do_expire(rng) && !oracle[p].empty()) {
                const Tuple got = t.expire_one(p);
                REQUIRE(got == oracle[p].front());
                oracle[p].pop_front();
            } else {
                const Tuple tup{static_cast<Key>(inserted), static_cast<Value>(inserted * 3)};
                t.insert(p, tup);
                oracle[p].push_back(tup);
                ++inserted;
            }
            REQUIRE(t.ptr_g() <= 2 * P);
        }
        CHECK(t.entry_count() == 2 * P);

        std::size_t live = 0;
        for (std::uint32_t p = 0; p < P; ++p) {
            auto scanned = drain_chain(t, p);
            REQUIRE(scanned.size() == oracle[p].size());
            for (std::size_t i = 0; i < scanned.size(); ++i) {
                REQUIRE(scanned[i] == oracle[p][i]);
            }
            live += scanned.size();
        }
        CHECK(live == t.size());
    }
}

TEST_CASE("arena chains allocate, append, and release") {
    auto t = Llat::arena(4);
    const auto a = t.new_chain();
    const auto b = t.new_chain();
    for (std::uint32_t i = 0; i < 9; ++i) {
        t.append_to_chain(a, {i, i});
    }
    t.append_to_chain(b, {100, 100});
    CHECK(t.size() == 10);

    std::vector<Key> keys;
    t.for_each_in_chain(a, [&](const Tuple& tup) { keys.push_back(tup.key); });
    REQUIRE(keys.size() == 9);
    for (std::uint32_t i = 0; i < 9; ++i) {
        CHECK(keys[i] == i);
    }

    CHECK(t.release_chain(a) == 9);
    CHECK(t.size() == 1);

    // released entries are reused
    const auto before = t.entry_count();
    const auto c = t.new_chain();
    for (std::uint32_t i = 0; i < 8; ++i) {
        t.append_to_chain(c, {i, i});
    }
    CHECK(t.entry_count() == before);
}
