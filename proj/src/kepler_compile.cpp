#include <map>

#include "timesplit/error.hpp"
#include "timesplit/kepler.hpp"

namespace timesplit::kepler {

namespace {

using model::Component;
using Local = std::span<const int>;
using Mutable = std::span<int>;

std::string fail_action(const std::string& node) { return "f_" + node; }
std::string repair_action(const std::string& node) { return "r_" + node; }
std::string start_action(const std::string& node) { return "rstart_" + node; }

// broken: 0 up, 1 failed and waiting, 2 under repair.
// inform: 0 quiet, 1 failure to announce, 2 repair to announce.
Component basic_event(const std::string& name, const BasicEvent& be, bool managed) {
    Component c;
    c.name = name;
    const auto broken = c.add_variable("broken", 0, 2, 0);
    const auto inform = c.add_variable("inform", 0, 2, 0);
    const auto fail = c.add_timer("fail", be.fail, true);

    model::TimedOutput down{"down_" + name, fail, [=](Local v) { return v[broken] == 0; }, {}, {}};
    if (be.repair) {
        const auto repair = c.add_timer("repair", *be.repair, false);
        if (managed) {
            down.effect = [=](Mutable v) {
                v[inform] = 1;
                v[broken] = 1;
            };
            c.inputs.push_back({start_action(name), [=](Local v) { return v[broken] == 1; },
                                [=](Mutable v) { v[broken] = 2; }, {repair}});
        } else {
            // Without a repair box the repair starts on failure.
            down.effect = [=](Mutable v) {
                v[inform] = 1;
                v[broken] = 2;
            };
            down.restarts = {repair};
        }
        c.timed.push_back(std::move(down));
        c.timed.push_back({"up_" + name, repair, [=](Local v) { return v[broken] == 2; },
                           [=](Mutable v) {
                               v[inform] = 2;
                               v[broken] = 0;
                           },
                           {fail}});
    } else {
        down.effect = [=](Mutable v) {
            v[inform] = 1;
            v[broken] = 1;
        };
        c.timed.push_back(std::move(down));
    }
    c.urgent.push_back({fail_action(name), [=](Local v) { return v[inform] == 1; },
                        [=](Mutable v) { v[inform] = 0; }, {}});
    c.urgent.push_back({repair_action(name), [=](Local v) { return v[inform] == 2; },
                        [=](Mutable v) { v[inform] = 0; }, {}});
    return c;
}

// Variables: down[0..n), then for PAND pair[0..n-1) where pair[i] records
// that child i failed no later than child i+1 (kept 0 unless both are
// down), then failed.
Component gate(const std::string& name, const Gate& g) {
    Component c;
    c.name = name;
    const std::size_t n = g.children.size();
    for (std::size_t i = 0; i < n; ++i) {
        c.add_variable("down_" + g.children[i], 0, 1, 0);
    }
    const bool pand = g.kind == GateKind::pand;
    const std::size_t pairs = pand ? n - 1 : 0;
    for (std::size_t i = 0; i < pairs; ++i) {
        c.add_variable("order_" + std::to_string(i), 0, 1, 0);
    }
    const auto failed = c.add_variable("failed", 0, 1, 0);

    for (std::size_t i = 0; i < n; ++i) {
        c.inputs.push_back({fail_action(g.children[i]), {},
                            [=](Mutable v) {
                                v[i] = 1;
                                if (pand) {
                                    if (i + 1 < n) {
                                        v[n + i] = 0;
                                    }
                                    if (i > 0) {
                                        v[n + i - 1] = v[i - 1];
                                    }
                                }
                            },
                            {}});
        c.inputs.push_back({repair_action(g.children[i]), {},
                            [=](Mutable v) {
                                v[i] = 0;
                                if (pand) {
                                    if (i + 1 < n) {
                                        v[n + i] = 0;
                                    }
                                    if (i > 0) {
                                        v[n + i - 1] = 0;
                                    }
                                }
                            },
                            {}});
    }

    const GateKind kind = g.kind;
    auto condition = [=](Local v) {
        if (kind == GateKind::or_gate) {
            for (std::size_t i = 0; i < n; ++i) {
                if (v[i] == 1) {
                    return true;
                }
            }
            return false;
        }
        for (std::size_t i = 0; i < n + pairs; ++i) {
            if (v[i] == 0) {
                return false;
            }
        }
        return true;
    };
    c.urgent.push_back({fail_action(name), [=](Local v) { return v[failed] == 0 && condition(v); },
                        [=](Mutable v) { v[failed] = 1; }, {}});
    c.urgent.push_back({repair_action(name), [=](Local v) { return v[failed] == 1 && !condition(v); },
                        [=](Mutable v) { v[failed] = 0; }, {}});
    return c;
}

// busy: 0 idle, i+1 while repairing managed event i.
Component repair_box(const RepairBox& box) {
    Component c;
    c.name = box.name;
    const std::size_t n = box.managed.size();
    const int top = static_cast<int>(n);
    if (box.policy == RepairPolicy::prio) {
        for (std::size_t i = 0; i < n; ++i) {
            c.add_variable("waiting_" + box.managed[i], 0, 1, 0);
        }
    } else {
        // Queue of waiting events (i+1), oldest first, 0-padded.
        for (std::size_t k = 0; k < n; ++k) {
            c.add_variable("queue_" + std::to_string(k), 0, top, 0);
        }
    }
    const auto busy = c.add_variable("busy", 0, top, 0);

    for (std::size_t i = 0; i < n; ++i) {
        const int tag = static_cast<int>(i) + 1;
        const std::string& be = box.managed[i];
        if (box.policy == RepairPolicy::prio) {
            c.inputs.push_back({fail_action(be), {}, [=](Mutable v) { v[i] = 1; }, {}});
            c.urgent.push_back({start_action(be),
                                [=](Local v) {
                                    if (v[busy] != 0 || v[i] == 0) {
                                        return false;
                                    }
                                    for (std::size_t j = 0; j < i; ++j) {
                                        if (v[j] == 1) {
                                            return false;
                                        }
                                    }
                                    return true;
                                },
                                [=](Mutable v) {
                                    v[busy] = tag;
                                    v[i] = 0;
                                },
                                {}});
        } else {
            c.inputs.push_back({fail_action(be), {},
                                [=](Mutable v) {
                                    std::size_t k = 0;
                                    while (k < n && v[k] != 0) {
                                        ++k;
                                    }
                                    if (k == n) {
                                        throw ModelError("repair queue of " + box.name + " overflows");
                                    }
                                    v[k] = tag;
                                },
                                {}});
            c.urgent.push_back({start_action(be), [=](Local v) { return v[busy] == 0 && v[0] == tag; },
                                [=](Mutable v) {
                                    v[busy] = tag;
                                    for (std::size_t k = 0; k + 1 < n; ++k) {
                                        v[k] = v[k + 1];
                                    }
                                    v[n - 1] = 0;
                                },
                                {}});
        }
        c.inputs.push_back({repair_action(be), [=](Local v) { return v[busy] == tag; },
                            [=](Mutable v) { v[busy] = 0; }, {}});
    }
    return c;
}

}  // namespace

model::Network compile(const DftModel& dft) {
    std::map<std::string, bool> managed;
    for (const auto& box : dft.rboxes) {
        for (const auto& be : box.managed) {
            managed[be] = true;
        }
    }
    model::Network net;
    std::size_t top_component = 0;
    std::size_t top_variable = 0;
    bool top_is_event = false;
    for (const auto& node : dft.nodes) {
        const bool is_top = node.name == dft.toplevel;
        std::size_t index;
        if (const auto* be = std::get_if<BasicEvent>(&node.body)) {
            index = net.add_component(basic_event(node.name, *be, managed.count(node.name) > 0));
            if (is_top) {
                top_variable = 0;
                top_is_event = true;
            }
        } else {
            auto comp = gate(node.name, std::get<Gate>(node.body));
            const std::size_t failed = comp.variables.size() - 1;
            index = net.add_component(std::move(comp));
            if (is_top) {
                top_variable = failed;
            }
        }
        if (is_top) {
            top_component = index;
        }
    }
    if (!dft.find(dft.toplevel)) {
        throw ModelError("toplevel \"" + dft.toplevel + "\" is not defined");
    }
    for (const auto& box : dft.rboxes) {
        net.add_component(repair_box(box));
    }
    const std::size_t var = net.variable_offset(top_component) + top_variable;
    net.set_target([=](const model::DiscreteState& s) { return top_is_event ? s[var] != 0 : s[var] == 1; },
                   dft.toplevel + " failed");
    return net;
}

}  // namespace timesplit::kepler
