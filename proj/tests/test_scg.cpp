#include <doctest.h>

#include <cmath>
#include <limits>

#include "support.hpp"
#include "worked_example.hpp"
#include "timesplit/error.hpp"
#include "timesplit/scg.hpp"
#include "timesplit/sim.hpp"

using namespace testing;
using namespace timesplit::scg;
using timesplit::dbm::Constraint;
using timesplit::dbm::lower_bound;
using timesplit::dbm::upper_bound;
using timesplit::model::EdgeId;
using timesplit::sim::SimState;

namespace {

bool has_class(const ScIndex& index, LocationId l, const Dbm& d, std::uint32_t omega) {
    for (ClassId id : index.classes_at(l)) {
        const auto& sc = index.state_class(id);
        if (sc.omega == omega && sc.domain == d) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("toy locations used below") {
    Toy t;
    CHECK(t.m.location(t.l0).active == std::vector<TimerId>{t.uf, t.af});
    CHECK(t.m.location(t.l1).active == std::vector<TimerId>{t.ur, t.af});
    CHECK(t.m.is_target(t.l3));
    CHECK(t.m.edge(t.l1_ur).target == t.l0);
}

TEST_CASE("worked predecessor chain is exact") {
    Toy t;
    const auto targets = target_classes(t.m);
    REQUIRE(targets.size() == 1);
    const auto& c1 = targets[0];
    CHECK(c1.location == t.l3);
    CHECK(c1.omega == 0);
    CHECK(c1.domain == t.d1());

    const auto c2 = predecessor(t.m, c1, t.l1_af);
    REQUIRE(c2);
    CHECK(c2->location == t.l1);
    CHECK(c2->omega == 1);
    CHECK(c2->domain == t.d2());

    const auto c3 = predecessor(t.m, *c2, t.l0_uf);
    REQUIRE(c3);
    CHECK(c3->location == t.l0);
    CHECK(c3->omega == 2);
    CHECK(c3->domain == t.d3());

    const auto c4 = predecessor(t.m, *c3, t.l1_ur);
    REQUIRE(c4);
    CHECK(c4->location == t.l1);
    CHECK(c4->omega == 3);
    CHECK(c4->domain == t.d4());

    const auto c5 = predecessor(t.m, *c4, t.l0_uf);
    REQUIRE(c5);
    CHECK(c5->location == t.l0);
    CHECK(c5->omega == 4);
    CHECK(c5->domain == t.d5());

    CHECK_THROWS_AS(predecessor(t.m, c1, t.l0_uf), timesplit::ModelError);
}

TEST_CASE("predecessor is empty when the edge cannot lead into the class") {
    Toy t;
    // AC must have just fired with UPS repair remaining above its support.
    StateClass late{t.l3, t.box({t.ur}, {lower_bound(t.ur, 1)}), 0};
    CHECK_FALSE(predecessor(t.m, late, t.l1_af));
}

TEST_CASE("backward expansion contains the worked chain") {
    Toy t;
    const auto index = backward_expand(t.m, 5);
    CHECK(has_class(index, t.l3, t.d1(), 0));
    CHECK(has_class(index, t.l1, t.d2(), 1));
    CHECK(has_class(index, t.l0, t.d3(), 2));
    CHECK(has_class(index, t.l1, t.d4(), 3));
    CHECK(has_class(index, t.l0, t.d5(), 4));

    const auto none = backward_expand(t.m, 0);
    CHECK(none.classes().size() == 1);
    CHECK(none.edges().empty());
    CHECK(none.d_cap() == 1);
}

TEST_CASE("successor from the initial class") {
    Toy t;
    const auto init = initial_class(t.m);
    CHECK(init.location == t.l0);
    CHECK(init.domain == t.box({t.uf, t.af}, {lower_bound(t.uf, q(49, 5)), upper_bound(t.uf, 12),
                                              lower_bound(t.af, q(1, 10)), upper_bound(t.af, 20)}));
    const auto next = successor(t.m, init, t.l0_uf);
    REQUIRE(next);
    CHECK(next->location == t.l1);
    CHECK(next->domain == t.box({t.ur, t.af}, {upper_bound(t.ur, q(1, 10)), upper_bound(t.af, q(51, 5))}));

    // AC is sure to fire first, so UPS cannot.
    StateClass early{t.l0, t.box({t.uf, t.af}, {lower_bound(t.uf, q(49, 5)), upper_bound(t.af, 1)}), 0};
    CHECK_FALSE(successor(t.m, early, t.l0_uf));
    CHECK(successor(t.m, early, *t.m.edge_for(t.l0, t.af)));
}

TEST_CASE("successor of a predecessor lands inside the class") {
    Toy t;
    const auto c2 = predecessor(t.m, target_classes(t.m)[0], t.l1_af);
    const auto forward = successor(t.m, *c2, t.l1_af);
    REQUIRE(forward);
    // Forward restarts nothing on this edge, so the image is the class itself.
    CHECK(t.d1().includes(forward->domain));
}

TEST_CASE("recorded edges are exact predecessors") {
    for (const char* file : {"toy_ups_ac.dft", "cascade.dft"}) {
        const auto m = load_model(file);
        const auto index = backward_expand(m, 8);
        for (const auto& e : index.edges()) {
            const auto& from = index.state_class(e.from);
            const auto& to = index.state_class(e.to);
            CHECK(from.omega == to.omega + 1);
            const auto pred = predecessor(m, to, e.edge);
            REQUIRE(pred);
            CHECK(pred->domain == from.domain);
        }
        for (const auto& sc : index.classes()) {
            CHECK_FALSE(sc.domain.is_empty());
            CHECK(sc.domain.is_canonical());
            CHECK(sc.domain.timers() == m.location(sc.location).active);
        }
    }
}

TEST_CASE("timed distance examples") {
    Toy t;
    const auto index = backward_expand(t.m, 5);
    CHECK(index.timed_distance(state_at(t.m, t.l1, {{t.ur, 0.08}, {t.af, 0.05}})) == 1);
    // UPS repaired first: the system has to go around the cycle again.
    CHECK(index.timed_distance(state_at(t.m, t.l1, {{t.ur, 0.05}, {t.af, 0.08}})) > 1);
    CHECK(index.timed_distance(state_at(t.m, t.l3, {{t.ur, 0.05}})) == 0);
    CHECK(index.timed_distance(state_at(t.m, t.l0, {{t.uf, 1.0}, {t.af, 11.0}})) <= 4);
    // AC far in the future: no short way to a system failure.
    CHECK(index.timed_distance(state_at(t.m, t.l0, {{t.uf, 11.0}, {t.af, 19.0}})) == index.d_cap());
}

TEST_CASE("timed distance never exceeds the steps a simulated path needed") {
    // A path that hits the target n steps after state s_i witnesses a way
    // from s_i in n - i expirations, so s_i lies in a class of omega <= n - i.
    for (const char* file : {"toy_ups_ac.dft", "cascade.dft"}) {
        const auto m = load_model(file);
        const std::uint32_t depth = 8;
        const auto index = backward_expand(m, depth);
        int hits = 0;
        for (std::uint64_t r = 0; r < 300; ++r) {
            timesplit::Rng rng(99, r);
            std::vector<SimState> path{timesplit::sim::sample_initial(m, rng)};
            while (!m.is_target(path.back().location) && path.size() < 20'000) {
                SimState s = path.back();
                if (!timesplit::sim::step(m, s, rng)) {
                    break;
                }
                path.push_back(s);
            }
            if (!m.is_target(path.back().location)) {
                continue;
            }
            ++hits;
            const std::size_t n = path.size() - 1;
            for (std::size_t i = n - std::min<std::size_t>(n, depth); i <= n; ++i) {
                CHECK(index.timed_distance(path[i]) <= n - i);
            }
        }
        CHECK(hits > 0);
    }
}

TEST_CASE("class sets grow with depth") {
    const auto m = load_model("cascade.dft");
    std::size_t previous = 0;
    for (std::uint32_t k : {0u, 2u, 4u, 6u, 8u}) {
        const auto index = backward_expand(m, k);
        CHECK(index.classes().size() >= previous);
        previous = index.classes().size();
        for (const auto& sc : index.classes()) {
            CHECK(sc.omega <= k);
        }
    }
}

TEST_CASE("cascade class counts are pinned") {
    // Regression values for the current construction.
    const auto m = load_model("cascade.dft");
    CHECK(backward_expand(m, 6).classes().size() == 37);
    CHECK(backward_expand(m, 10).classes().size() == 66);
    CHECK(backward_expand(m, 14).classes().size() == 264);
    CHECK(backward_expand(m, 18).classes().size() == 1036);
    CHECK(backward_expand(m, 22).classes().size() == 2196);
}

TEST_CASE("class cap") {
    const auto m = load_model("cascade.dft");
    ExpandOptions small;
    small.class_cap = 20;
    CHECK_THROWS_AS(backward_expand(m, 10, small), timesplit::Error);
}

TEST_CASE("exports") {
    Toy t;
    const auto index = backward_expand(t.m, 3);
    const auto j = index.to_json(t.m);
    CHECK(j.dump().find("classes") != std::string::npos);
    CHECK(index.to_dot(t.m).find("digraph") == 0);
    std::size_t total = 0;
    for (auto c : index.class_counts()) {
        total += c;
    }
    CHECK(total == index.classes().size());
}
