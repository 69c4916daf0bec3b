#include <random>

#include "adasharp/ctu_partition.hpp"
#include "adasharp/error.hpp"
#include "adasharp/y4m.hpp"
#include "doctest.h"
#include "quadtree_oracle.hpp"
#include "test_support.hpp"

using namespace adasharp;

namespace {

double tree_cost(const FloatPlane& ctu, const CtuPartition& p, const RdoParams& params) {
    double cost = 0.0;
    for (const auto& leaf : p.leaves) {
        cost += testing::integer_leaf_sse(ctu, leaf.x, leaf.y, leaf.size) +
                params.lambda_rdo * params.leaf_bits;
    }
    // Each split turns one leaf into four.
    CHECK(p.split_count == (p.leaves.size() - 1) / 3);
    return cost + static_cast<double>(p.split_count) * params.lambda_rdo * params.split_bits;
}

FloatPlane checker_quadrant_ctu() {
    return testing::make_plane(64, 64, [](int x, int y) {
        if (x >= 32 && y < 32) {
            return ((x / 8 + y / 8) % 2) ? 255.0 : 0.0;
        }
        return 100.0;
    });
}

}  // namespace

TEST_CASE("leaf distortion closed forms") {
    const std::vector<double> flat(64, 77.0);
    CHECK(leaf_distortion(flat) == 0.0);
    std::vector<double> half(64, 0.0);
    std::fill(half.begin() + 32, half.end(), 255.0);
    CHECK(leaf_distortion(half) == 1040400.0);
    const std::vector<double> pair = {0.0, 2.0};
    CHECK(leaf_distortion(pair) == 2.0);
}

TEST_CASE("RDO parameter validation") {
    CHECK_NOTHROW(RdoParams{}.validate());
    CHECK_THROWS_AS((RdoParams{-1, 32, 1}.validate()), PreconditionError);
    CHECK_THROWS_AS((RdoParams{1, 0, 1}.validate()), PreconditionError);
    CHECK_THROWS_AS((RdoParams{1, 32, -1}.validate()), PreconditionError);
    CHECK_THROWS_AS((RdoParams{NAN, 32, 1}.validate()), PreconditionError);
    CHECK_THROWS_AS(partition_ctu(FloatPlane(32, 64), RdoParams{}), DimensionError);
}

TEST_CASE("constant CTU stays a single leaf for any lambda") {
    for (double lambda : {0.0, 0.5, 10.0, 1e6}) {
        const CtuPartition p = partition_ctu(FloatPlane(64, 64, 42.0), {lambda, 32, 1});
        REQUIRE(p.leaves.size() == 1);
        CHECK(p.leaves[0] == CuLeaf{0, 0, 64});
        CHECK(p.cost == lambda * 32);
    }
}

TEST_CASE("only the textured quadrant splits") {
    const FloatPlane ctu = checker_quadrant_ctu();
    const CtuPartition p = partition_ctu(ctu, {0.5, 32, 1});
    for (const auto& leaf : p.leaves) {
        const bool in_quadrant = leaf.x >= 32 && leaf.y < 32;
        CAPTURE(leaf.x);
        CAPTURE(leaf.y);
        CHECK(leaf.size == (in_quadrant ? 8 : 32));
    }
    CHECK(p.leaves.size() == 16 + 3);
    CHECK(p.cost == testing::brute_force_ctu(ctu, 0.5, 32, 1).best_cost);
}

TEST_CASE("DP cost equals exhaustive enumeration") {
    const std::array<double, 5> lambdas = {0.0, 0.5, 2.25, 10.0, 100.0};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const FloatPlane ctu = testing::random_ctu(seed);
        const RdoParams params{lambdas[seed % lambdas.size()], 32, 1};
        const CtuPartition p = partition_ctu(ctu, params);
        const auto oracle = testing::brute_force_ctu(ctu, params.lambda_rdo, params.leaf_bits,
                                                     params.split_bits);
        CAPTURE(seed);
        CHECK(oracle.trees == 83522);
        CHECK(p.cost == oracle.best_cost);
        CHECK(tree_cost(ctu, p, params) == p.cost);
    }
}

TEST_CASE("leaf count is non-increasing in lambda") {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        const FloatPlane ctu = testing::random_ctu(seed);
        std::size_t previous = SIZE_MAX;
        for (double lambda : {0.0, 0.25, 1.0, 4.0, 16.0, 64.0, 256.0, 1024.0, 1e5}) {
            const std::size_t leaves = partition_ctu(ctu, {lambda, 32, 1}).leaves.size();
            CHECK(leaves <= previous);
            previous = leaves;
        }
    }
}

TEST_CASE("huge lambda gives one leaf") {
    const FloatPlane ctu = testing::random_ctu(7);
    const double sse = testing::integer_leaf_sse(ctu, 0, 0, 64);
    const CtuPartition p = partition_ctu(ctu, {sse / 1.0 + 1.0, 32, 1});
    CHECK(p.leaves.size() == 1);
}

TEST_CASE("leaves tile the CTU in z-order") {
    const CtuPartition p = partition_ctu(testing::random_ctu(3), {2.0, 32, 1});
    std::vector<int> cover(64 * 64, 0);
    for (const auto& leaf : p.leaves) {
        CHECK(leaf.x % leaf.size == 0);
        CHECK(leaf.y % leaf.size == 0);
        for (int y = leaf.y; y < leaf.y + leaf.size; ++y)
            for (int x = leaf.x; x < leaf.x + leaf.size; ++x) ++cover[y * 64 + x];
    }
    CHECK(std::all_of(cover.begin(), cover.end(), [](int c) { return c == 1; }));
}

TEST_CASE("frame partition examples") {
    SUBCASE("constant 128x128") {
        const FramePartition fp = partition_frame(Frame::filled(128, 128, 128), RdoParams{});
        CHECK(fp.mask == PartitionMask::uniform(128, 128, 64));
        CHECK(fp.leaf_count == 4);
        CHECK(fp.leaves_by_size[3] == 4);
    }
    SUBCASE("70x70 constant is cropped from padding") {
        const FramePartition fp = partition_frame(Frame::filled(70, 70, 3), RdoParams{});
        CHECK(fp.mask.width() == 70);
        CHECK(fp.mask.height() == 70);
        CHECK(fp.mask == PartitionMask::uniform(70, 70, 64));
    }
    SUBCASE("uniform noise with lambda 0 splits fully") {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            std::mt19937_64 rng(seed);
            std::uniform_int_distribution<int> u(0, 255);
            const Frame f = testing::make_frame(64, 64, [&](int, int) { return u(rng); });
            const FramePartition fp = partition_frame(f, {0.0, 32, 1});
            CHECK(fp.mask == PartitionMask::uniform(64, 64, 8));
        }
    }
    SUBCASE("masks are quadtree consistent and deterministic across job counts") {
        const Frame f = testing::random_textured_frame(200, 136, 11);
        const FramePartition a = partition_frame(f, RdoParams{}, 1);
        const FramePartition b = partition_frame(f, RdoParams{}, 4);
        CHECK(a.mask == b.mask);
        CHECK(a.total_cost == b.total_cost);
        CHECK_FALSE(find_quadtree_violation(a.mask).has_value());
        const auto hist = a.mask.histogram();
        CHECK(std::count_if(hist.begin(), hist.end(), [](std::size_t n) { return n > 0; }) >= 2);
    }
    SUBCASE("border CTUs see replicated edges") {
        // Right edge column is textured; replication keeps the padded part textured too.
        const Frame f = testing::make_frame(72, 64, [](int x, int y) {
            return x >= 64 ? ((y / 8) % 2) * 255 : 90;
        });
        const FramePartition fp = partition_frame(f, {0.5, 32, 1});
        CHECK(fp.mask.at(0, 0) == 64);
        CHECK(fp.mask.at(70, 10) == 8);
    }
    CHECK_THROWS_AS(partition_frame(FloatPlane(), RdoParams{}), PreconditionError);
}

TEST_CASE("natural fixtures produce mixed CU sizes") {
    for (const char* name : {"natural_astronaut.y4m", "natural_coffee.y4m"}) {
        const Sequence seq = read_y4m_file(testing::data_path(name));
        auto sizes_used = [&](double lambda) {
            const auto hist = partition_frame(seq[0], {lambda, 32, 1}).mask.histogram();
            return std::count_if(hist.begin(), hist.end(), [](std::size_t n) { return n > 0; });
        };
        CAPTURE(name);
        CHECK(sizes_used(RdoParams{}.lambda_rdo) >= 2);
        CHECK(sizes_used(1000.0) >= 3);
        CHECK(partition_frame(seq[0], {0.0, 32, 1}).mask.histogram()[0] > 250u * 250u);
    }
}
