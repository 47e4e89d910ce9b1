#pragma once

// The toy UPS/AC model and the exact chain of predecessor domains from its
// system-failure class: two UPS failures with one UPS repair in between.

#include "support.hpp"
#include "timesplit/scg.hpp"

namespace testing {

using timesplit::dbm::Constraint;
using timesplit::dbm::lower_bound;
using timesplit::dbm::upper_bound;
using timesplit::model::EdgeId;
using timesplit::model::LocationId;

struct Toy {
    timesplit::model::FlatModel m = load_model("toy_ups_ac.dft");
    TimerId uf = timer_by_name(m, "UPS.fail");
    TimerId ur = timer_by_name(m, "UPS.repair");
    TimerId af = timer_by_name(m, "AC.fail");
    LocationId l0 = 0;
    EdgeId l0_uf = *m.edge_for(l0, uf);
    LocationId l1 = m.edge(l0_uf).target;
    EdgeId l1_ur = *m.edge_for(l1, ur);
    EdgeId l1_af = *m.edge_for(l1, af);
    LocationId l3 = m.edge(l1_af).target;
    LocationId l2 = m.edge(*m.edge_for(l0, af)).target;

    Dbm box(std::vector<TimerId> timers, std::initializer_list<Constraint> cs) const {
        return Dbm::unconstrained(std::move(timers)).intersect(std::vector<Constraint>(cs));
    }

    Dbm d1() const { return box({ur}, {upper_bound(ur, q(1, 10))}); }
    Dbm d2() const {
        return box({ur, af}, {upper_bound(ur, q(1, 10)), upper_bound(af, q(1, 10)), {af, ur, Bound(0)},
                              {ur, af, Bound(q(1, 10))}});
    }
    Dbm d3() const {
        return box({uf, af}, {upper_bound(uf, 12), upper_bound(af, q(121, 10)), {uf, af, Bound(0)},
                              {af, uf, Bound(q(1, 10))}});
    }
    Dbm d4() const {
        return box({ur, af}, {upper_bound(ur, q(1, 10)), lower_bound(af, q(49, 5)), upper_bound(af, q(61, 5)),
                              {ur, af, Bound(q(-49, 5))}, {af, ur, Bound(q(121, 10))}});
    }
    Dbm d5() const {
        return box({uf, af}, {upper_bound(uf, q(51, 5)), lower_bound(af, q(49, 5)), upper_bound(af, 20),
                              {uf, af, Bound(q(-49, 5))}, {af, uf, Bound(q(61, 5))}});
    }
};

}  // namespace testing
