#include "doctest.h"
#include "helpers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace mbmp;
using mbmp::test::make_topology;

TEST_SUITE("geometry")
{
    TEST_CASE("classify rings")
    {
        const Topology t = make_topology({{0, 0}, {200, 0}, {400, 0}, {800, 0}, {1200, 0}}, {}, {2000, 1000});
        CHECK(t.classify(0, 1) == NeighborClass::TxNeighbor);
        CHECK(t.classify(0, 2) == NeighborClass::CsNeighbor);
        CHECK(t.classify(0, 3) == NeighborClass::NcsNeighbor);
        CHECK(t.classify(0, 4) == NeighborClass::Disconnected);
    }

    TEST_CASE("distance on a boundary falls into the inner ring")
    {
        const Topology t = make_topology({{0, 0}, {250, 0}, {550, 0}, {1100, 0}}, {}, {2000, 1000});
        CHECK(t.classify(0, 1) == NeighborClass::TxNeighbor);
        CHECK(t.classify(0, 2) == NeighborClass::CsNeighbor);
        CHECK(t.classify(0, 3) == NeighborClass::NcsNeighbor);
    }

    TEST_CASE("classify rejects unknown and identical ids")
    {
        const Topology t = make_topology({{0, 0}, {10, 0}});
        CHECK_THROWS_AS((void)t.classify(0, 7), std::invalid_argument);
        CHECK_THROWS_AS((void)t.classify(1, 1), std::invalid_argument);
        CHECK_THROWS_AS((void)t.cneighbors(5), std::invalid_argument);
    }

    TEST_CASE("radio config validation")
    {
        RadioConfig r;
        r.cs_range = 100.0;
        CHECK_THROWS_AS(r.validate(), std::invalid_argument);
        r = {};
        r.channel_capacity = 0.0;
        CHECK_THROWS_AS(r.validate(), std::invalid_argument);
        CHECK_NOTHROW(RadioConfig{}.validate());
    }

    TEST_CASE("single node has no c-neighbors")
    {
        const Topology t = make_topology({{500, 500}});
        CHECK(t.cneighbors(0).empty());
    }

    TEST_CASE("fig1 layout")
    {
        // ids: 0 B, 1 A, 2 C, 3 D, 4 E, 5 F
        const Topology t = make_topology(mbmp::test::fig1_line(), {}, {1100, 100});
        const auto c = t.cneighbors(2);
        CHECK(std::find(c.begin(), c.end(), NodeId{4}) != c.end());
        const auto e = t.cneighbors(4);
        CHECK(std::find(e.begin(), e.end(), NodeId{1}) == e.end());
    }

    TEST_CASE("cneighbors match the pairwise oracle and classify")
    {
        std::mt19937_64 rng(42);
        for (int trial = 0; trial < 20; ++trial)
        {
            const Arena arena{1000, 1000};
            const auto pts = mbmp::test::random_points(20, arena, rng);
            const Topology t = make_topology(pts, {}, arena);
            for (NodeId a = 0; a < t.size(); ++a)
            {
                std::vector<NodeId> oracle;
                for (NodeId b = 0; b < t.size(); ++b)
                {
                    if (b == a)
                        continue;
                    const double d = std::hypot(pts[a].x - pts[b].x, pts[a].y - pts[b].y);
                    if (d <= t.radio().cs_range)
                        oracle.push_back(b);
                    const auto cls = t.classify(a, b);
                    CHECK(cls == t.classify(b, a));
                    const bool in_cs = cls == NeighborClass::TxNeighbor || cls == NeighborClass::CsNeighbor;
                    CHECK(in_cs == (d <= t.radio().cs_range));
                }
                CHECK(t.cneighbors(a) == oracle);
            }
        }
    }

    TEST_CASE("ncs range covers every c-neighbor's sensing disc")
    {
        std::mt19937_64 rng(7);
        const Arena arena{1500, 1500};
        const Topology t = make_topology(mbmp::test::random_points(40, arena, rng), {}, arena);
        for (NodeId a = 0; a < t.size(); ++a)
            for (NodeId b : t.cneighbors(a))
                for (NodeId c : t.cneighbors(b))
                    if (c != a)
                        CHECK(t.distance(a, c) <= t.radio().ncs_range);
    }

    TEST_CASE("linear motion toward a waypoint")
    {
        Topology t = make_topology({{0, 0}});
        MobilityConfig cfg;
        cfg.enabled = true;
        RandomWaypoint rw(cfg, {WaypointState{{100, 0}, 5.0, 0.0}});
        std::mt19937_64 rng(1);
        rw.step(t, 10.0, rng);
        CHECK(t.position(0).x == doctest::Approx(50.0));
        CHECK(t.position(0).y == doctest::Approx(0.0));
    }

    TEST_CASE("zero speed leaves the topology unchanged")
    {
        std::mt19937_64 rng(3);
        const Arena arena{1000, 1000};
        Topology t = make_topology(mbmp::test::random_points(10, arena, rng), {}, arena);
        const Topology before = t;
        MobilityConfig cfg;
        cfg.enabled = true;
        cfg.min_speed = 0.0;
        cfg.max_speed = 0.0;
        auto rw = RandomWaypoint::initial(t, cfg, rng);
        for (int i = 0; i < 100; ++i)
            rw.step(t, 0.1, rng);
        CHECK(t == before);
    }

    TEST_CASE("mobility is deterministic and stays in the arena")
    {
        auto run = [](std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            const Arena arena{1000, 1000};
            Topology t = make_topology(mbmp::test::random_points(25, arena, rng), {}, arena);
            MobilityConfig cfg;
            cfg.enabled = true;
            cfg.max_speed = 20.0;
            cfg.pause = 1.0;
            auto rw = RandomWaypoint::initial(t, cfg, rng);
            for (int i = 0; i < 2000; ++i)
            {
                rw.step(t, 0.1, rng);
                for (const auto &n : t.nodes())
                    REQUIRE(arena.contains(n.pos));
            }
            return t;
        };
        CHECK(run(11) == run(11));
        CHECK_FALSE(run(11) == run(12));
    }

    TEST_CASE("waypoint motion concentrates toward the center")
    {
        std::mt19937_64 rng(5);
        const Arena arena{1000, 1000};
        Topology t = make_topology(mbmp::test::random_points(200, arena, rng), {}, arena);
        MobilityConfig cfg;
        cfg.enabled = true;
        cfg.min_speed = 5.0;
        cfg.max_speed = 20.0;
        cfg.pause = 0.0;
        auto rw = RandomWaypoint::initial(t, cfg, rng);
        int central = 0, samples = 0;
        for (int i = 0; i < 3000; ++i)
        {
            rw.step(t, 1.0, rng);
            if (i < 500 || i % 10 != 0)
                continue;
            for (const auto &n : t.nodes())
            {
                ++samples;
                if (std::abs(n.pos.x - 500) < 250 && std::abs(n.pos.y - 500) < 250)
                    ++central;
            }
        }
        // A uniform placement puts a quarter of the nodes in the central square.
        CHECK(static_cast<double>(central) / samples > 0.30);
    }

    TEST_CASE("step rejects a non-positive dt")
    {
        Topology t = make_topology({{0, 0}});
        RandomWaypoint rw({}, {WaypointState{}});
        std::mt19937_64 rng(1);
        CHECK_THROWS_AS(rw.step(t, 0.0, rng), std::invalid_argument);
    }
}
