#pragma once

// Kepler repairable dynamic fault trees.
//
//   toplevel "PAND1";
//   "PAND1" pand "BE1" "BE2";
//   "BE1" fail~uniform(9.8,12) repair~uniform(0,0.1);
//   "BE2" fail~exponential(0.05) repair~uniform(0,0.1);
//   "RBOX" rbox fcfs "BE1" "BE2";
//
// Statements end in ';', node names are double-quoted, '#' starts a comment
// that runs to the end of the line. Gates: and, or, pand. Repair boxes:
// prio (declared order) or fcfs (failure order).

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "timesplit/distribution.hpp"
#include "timesplit/model.hpp"

namespace timesplit::kepler {

enum class GateKind { and_gate, or_gate, pand };

struct Gate {
    GateKind kind = GateKind::and_gate;
    std::vector<std::string> children;
    friend bool operator==(const Gate&, const Gate&) = default;
};

struct BasicEvent {
    model::Distribution fail;
    /// Absent for non-repairable events.
    std::optional<model::Distribution> repair;
    friend bool operator==(const BasicEvent&, const BasicEvent&) = default;
};

struct Node {
    std::string name;
    std::variant<Gate, BasicEvent> body;
    friend bool operator==(const Node&, const Node&) = default;
};

enum class RepairPolicy { prio, fcfs };

struct RepairBox {
    std::string name;
    RepairPolicy policy = RepairPolicy::prio;
    std::vector<std::string> managed;
    friend bool operator==(const RepairBox&, const RepairBox&) = default;
};

struct DftModel {
    std::string toplevel;
    /// Declaration order.
    std::vector<Node> nodes;
    std::vector<RepairBox> rboxes;

    const Node* find(std::string_view name) const;
    friend bool operator==(const DftModel&, const DftModel&) = default;
};

/// Throws ParseError (with line/column) on lexical, syntactic and semantic
/// errors: unknown children, cycles, duplicate or missing toplevel,
/// duplicate names, events managed by several repair boxes.
DftModel parse(std::string_view text);

/// Canonical Kepler text; parse(print(m)) == m.
std::string print(const DftModel& model);

/// One component per basic event, gate and repair box. The target predicate
/// is "toplevel node failed".
model::Network compile(const DftModel& dft);

}  // namespace timesplit::kepler
