#pragma once

#include <string>
#include <vector>

#include "schwadapt/pauli.hpp"

namespace schwadapt {

enum class GateKind { CNOT, RZ, CLIFF1 };

struct Gate {
  GateKind kind;
  int q0 = 0;           ///< target (RZ/CLIFF1) or control (CNOT)
  int q1 = -1;          ///< CNOT target
  double angle = 0.0;   ///< RZ rotation
  std::string tag;      ///< CLIFF1 label: "H", "S", "Sdg"
};

struct Circuit {
  uint32_t n = 0;
  std::vector<Gate> gates;
};

/// Deterministic Pauli-exponential synthesis. A weight-w string becomes a
/// basis-change layer, a CNOT ladder onto its highest support qubit, one RZ,
/// and the mirror: exactly 2(w-1) CNOTs. Multi-term sums synthesize as a
/// first-order product over terms ordered by (support minimum, letters);
/// this labeled Trotter synthesis is for gate counting, the energy pipeline
/// stays exact.
Circuit synthesize_exponential(const PauliSum& op, double theta);

/// Longest chain of CNOTs in the qubit-dependency DAG (ASAP schedule;
/// single-qubit gates occupy slots but are not counted).
int cnot_depth(const Circuit& c);

long cnot_count(const Circuit& c);
long rz_count(const Circuit& c);

Circuit concatenate(const std::vector<Circuit>& circuits);

/// Optional peephole removing adjacent inverse CNOT pairs; reported
/// separately from the raw counts.
Circuit cancel_adjacent_cnots(const Circuit& c);

struct ResourceSummary {
  long cnots = 0;
  int depth = 0;
  long rzs = 0;
};

/// Metrics of the concatenated per-step circuits, in ansatz order.
ResourceSummary ansatz_resources(
    const std::vector<std::pair<const PauliSum*, double>>& steps);

/// Line-per-gate dump: "CNOT 0 1", "RZ 3 0.125", "H 2".
std::string circuit_to_text(const Circuit& c);

/// Dense unitary of a circuit (n <= 12), for synthesis verification.
Eigen::MatrixXcd circuit_unitary(const Circuit& c);

}  // namespace schwadapt
