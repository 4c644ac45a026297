#pragma once

#include <cstdint>
#include <vector>

#include "qrev/circuit.hpp"

namespace qrev {

/// A classical basis state over all wires of a circuit.
struct BasisState {
    std::vector<std::uint8_t> bits;

    explicit BasisState(int wire_count = 0) : bits(static_cast<std::size_t>(wire_count), 0) {}

    [[nodiscard]] bool get(Wire w) const { return bits.at(static_cast<std::size_t>(w)) != 0; }
    void set(Wire w, bool v) { bits.at(static_cast<std::size_t>(w)) = v ? 1 : 0; }
};

/// Writes `value` into a little-endian register (value must fit).
void encode_register(BasisState& s, const Register& r, std::uint64_t value);
/// Reads a little-endian register as an unsigned integer (width <= 64).
[[nodiscard]] std::uint64_t decode_register(const BasisState& s, const Register& r);

/// Runs the gate stream on a basis state. In strict mode (the default)
/// the ancilla discipline is enforced: a wire must carry 0 when allocated
/// and again when freed, and a violation throws std::runtime_error (this
/// is how tests detect garbage leaks). In lenient mode violations pass
/// silently and a dirty freed wire keeps its value, so a later allocation
/// hands out the stale bit; error-rate harnesses use this to measure how
/// bounded-error circuits actually misbehave. Returns the final state.
[[nodiscard]] BasisState simulate(const Circuit& c, BasisState state, bool strict = true);

/// Static gate-level resources of a circuit.
struct CostReport {
    long long toffoli_count = 0;
    /// ASAP schedule depth counting only Toffolis: a Toffoli occupies all
    /// three of its wires for one time step; NOT/CNOT take zero time but
    /// still synchronize their wires.
    long long toffoli_depth = 0;
    /// Maximum number of simultaneously live wires.
    int qubit_highwater = 0;
    /// Number of declared garbage wires.
    int garbage_count = 0;
};

[[nodiscard]] CostReport cost(const Circuit& c);

/// Exhaustively checks that the circuit implements an injective map on
/// its primary inputs (wires live before the first gate) and that every
/// run respects the ancilla discipline. Only feasible for small widths;
/// throws std::invalid_argument when 2^inputs exceeds `max_states`.
[[nodiscard]] bool check_reversibility(const Circuit& c, std::uint64_t max_states = (1u << 20));

}  // namespace qrev
