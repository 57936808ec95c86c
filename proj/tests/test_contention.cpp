#include "doctest.h"
#include "helpers.hpp"

#include "mbmp/contention.hpp"

#include <algorithm>
#include <limits>

using namespace mbmp;

namespace
{
    enum : NodeId
    {
        A,
        B,
        C,
        D,
        E,
        F
    };

    CNeighborSet set_of(NodeId owner, std::initializer_list<std::pair<NodeId, int>> entries)
    {
        CNeighborSet s(owner);
        for (auto [n, h] : entries)
            s.learn(n, h, 0.0);
        return s;
    }

    RouteRecord full(std::vector<NodeId> hops)
    {
        return RouteRecord{std::move(hops), true};
    }

    int brute_force(const Topology &t, const RouteRecord &r, NodeId q)
    {
        int count = 0;
        for (std::size_t i = 0; i + 1 < r.hops.size(); ++i)
        {
            const NodeId tx = r.hops[i];
            if (tx == q)
                ++count;
            else if (t.distance(tx, q) <= t.radio().cs_range)
                ++count;
        }
        return count;
    }
} // namespace

TEST_SUITE("contention")
{
    TEST_CASE("partial route at the second hop")
    {
        const RouteRecord partial{{A, B}, false};
        CHECK(contention_count(partial, B, set_of(B, {{A, 1}})) == 2);
    }

    TEST_CASE("full route examples")
    {
        const auto route = full({A, B, C, D});
        CHECK(contention_count(route, C, set_of(C, {{A, 2}, {B, 1}, {D, 1}})) == 3);
        CHECK(contention_count(route, A, set_of(A, {{B, 1}, {C, 2}})) == 3);
        CHECK(consumed_bandwidth(route, C, set_of(C, {{A, 2}, {B, 1}, {D, 1}}), 1000.0) == doctest::Approx(3000.0));
    }

    TEST_CASE("off-route node with an empty set counts nothing")
    {
        CHECK(contention_count(full({A, B, C}), F, CNeighborSet(F)) == 0);
        CHECK(consumed_bandwidth(full({A, B, C}), F, CNeighborSet(F), 5e5) == 0.0);
    }

    TEST_CASE("off-route observer of a five-node route counts four transmitters")
    {
        const auto s = set_of(F, {{A, 2}, {B, 2}, {C, 1}, {D, 1}, {E, 2}});
        CHECK(contention_count(full({A, B, C, D, E}), F, s) == 4);
        CHECK(consumed_bandwidth(full({A, B, C, D, E}), F, s, 2000.0) == doctest::Approx(8000.0));
    }

    TEST_CASE("the destination does not count itself")
    {
        CHECK(contention_count(full({A, B, C}), C, set_of(C, {{A, 2}, {B, 1}})) == 2);
    }

    TEST_CASE("entries beyond k_cs hops do not participate")
    {
        const auto s = set_of(F, {{A, 4}, {B, 3}, {C, 2}, {D, 1}});
        CHECK(contention_count(full({A, B, C, D, E}), F, s) == 2);
        CHECK(contention_count(full({A, B, C, D, E}), F, s, 4) == 4);
    }

    TEST_CASE("owner mismatch and empty route are rejected")
    {
        CHECK_THROWS_AS((void)contention_count(full({A, B}), A, CNeighborSet(B)), std::invalid_argument);
        CHECK_THROWS_AS((void)contention_count(RouteRecord{}, A, CNeighborSet(A)), std::invalid_argument);
    }

    TEST_CASE("route record helpers")
    {
        const auto r = full({A, B, C, D});
        CHECK(r.transmitters() == std::vector<NodeId>{A, B, C});
        CHECK(RouteRecord{{A, B, C}, false}.transmitters() == std::vector<NodeId>{A, B, C});
        CHECK(r.index_of(C) == 2);
        CHECK(r.index_of(F) == -1);
        CHECK(r.loop_free());
        CHECK_FALSE(full({A, B, A}).loop_free());
    }

    TEST_CASE("hello learning")
    {
        CNeighborSet s(A);
        learn_from_hello(s, HelloMessage{B, {}}, 1.0);
        CHECK(s.entries().size() == 1);
        CHECK(s.hops_to(B) == 1);

        learn_from_hello(s, HelloMessage{C, {{D, 1}}}, 2.0);
        CHECK(s.hops_to(D) == 2);
    }

    TEST_CASE("min-merge keeps the smallest estimate")
    {
        CNeighborSet s(A);
        learn_from_hello(s, HelloMessage{B, {{D, 2}}}, 1.0);
        learn_from_hello(s, HelloMessage{C, {{D, 1}}}, 2.0);
        CHECK(s.hops_to(D) == 2);
        s.learn(D, 5, 3.0);
        CHECK(s.hops_to(D) == 2);
        CHECK(s.entries().at(D).last_updated == 3.0);
    }

    TEST_CASE("passive learning from an overheard route")
    {
        CNeighborSet s(F);
        const auto route = full({A, B, C, D, E});
        learn_passively(s, D, route, 1.0);
        CHECK(s.hops_to(D) == 1);
        CHECK(s.hops_to(C) == 2);
        CHECK(s.hops_to(E) == 2);
        CHECK(s.hops_to(B) == 3);
        CHECK(s.hops_to(A) == 4);

        learn_passively(s, B, route, 2.0);
        CHECK(s.hops_to(B) == 1);
        CHECK(s.hops_to(A) == 2);
        CHECK(s.hops_to(D) == 1);
    }

    TEST_CASE("one-node route teaches only the sender")
    {
        CNeighborSet s(F);
        learn_passively(s, A, RouteRecord{{A}, false}, 0.0);
        CHECK(s.entries().size() == 1);
        CHECK(s.hops_to(A) == 1);
    }

    TEST_CASE("the owner never learns itself")
    {
        CNeighborSet s(C);
        learn_passively(s, B, full({A, B, C, D}), 0.0);
        CHECK_FALSE(s.knows(C));
        CHECK(s.entries().size() == 3);
    }

    TEST_CASE("expiry")
    {
        CNeighborSet s(F);
        s.learn(A, 1, 0.0);
        s.learn(B, 1, 5.0);
        s.learn(C, 1, 9.0);

        CNeighborSet keep = s;
        keep.expire(100.0, std::numeric_limits<double>::infinity());
        CHECK(keep == s);

        CNeighborSet mixed = s;
        mixed.expire(10.0, 4.0);
        CHECK_FALSE(mixed.knows(A));
        CHECK_FALSE(mixed.knows(B));
        CHECK(mixed.knows(C));

        s.expire(100.0, 1.0);
        CHECK(s.entries().empty());
    }

    TEST_CASE("learning is order-insensitive and never raises an estimate")
    {
        std::mt19937_64 rng(17);
        std::uniform_int_distribution<int> node(0, 9), hop(1, 5);
        for (int trial = 0; trial < 50; ++trial)
        {
            std::vector<std::pair<NodeId, int>> msgs;
            for (int i = 0; i < 30; ++i)
                msgs.push_back({static_cast<NodeId>(node(rng)), hop(rng)});
            CNeighborSet fwd(99), rev(99);
            for (auto [n, h] : msgs)
            {
                const int before = fwd.hops_to(n);
                fwd.learn(n, h, 0.0);
                CHECK((before == 0 || fwd.hops_to(n) <= before));
            }
            std::reverse(msgs.begin(), msgs.end());
            for (auto [n, h] : msgs)
                rev.learn(n, h, 0.0);
            CHECK(fwd == rev);
        }
    }

    TEST_CASE("geometric sets match the brute-force count and bound any learned subset")
    {
        std::mt19937_64 rng(2024);
        std::uniform_int_distribution<int> size(3, 15);
        const Arena arena{1000, 1000};
        for (int trial = 0; trial < 200; ++trial)
        {
            const auto n = static_cast<std::size_t>(size(rng));
            const Topology t = mbmp::test::make_topology(mbmp::test::random_points(n, arena, rng), {}, arena);
            std::vector<NodeId> ids(n);
            for (NodeId i = 0; i < n; ++i)
                ids[i] = i;
            std::shuffle(ids.begin(), ids.end(), rng);
            const std::size_t len = 2 + rng() % (n - 1);
            const RouteRecord route = full({ids.begin(), ids.begin() + static_cast<long>(std::min(len, n))});
            for (NodeId q = 0; q < n; ++q)
            {
                CNeighborSet geo(q), learned(q);
                for (NodeId c : t.cneighbors(q))
                {
                    geo.learn(c, 1, 0.0);
                    if (rng() % 2)
                        learned.learn(c, 1, 0.0);
                }
                const int g = contention_count(route, q, geo);
                CHECK(g == brute_force(t, route, q));
                CHECK(contention_count(route, q, learned) <= g);
            }
        }
    }
}
