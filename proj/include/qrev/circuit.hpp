#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qrev {

/// Index of a wire (qubit) inside a Circuit. Wires are created through
/// Circuit::add_wire / Circuit::add_register and may be recycled after
/// Circuit::free_wire.
using Wire = std::int32_t;

enum class GateKind : std::uint8_t { Not, Cnot, Toffoli };

/// A control terminal of a gate. `positive` selects the polarity: a
/// positive control fires on |1>, a negative control on |0>.
struct Control {
    Wire wire = -1;
    bool positive = true;
};

/// One reversible gate over the {NOT, CNOT, TOFFOLI} alphabet with
/// first-class control polarities, so that conditioning on a zero bit
/// does not require NOT-conjugation (which would distort gate counts).
struct Gate {
    GateKind kind = GateKind::Not;
    std::uint8_t control_count = 0;
    Wire target = -1;
    std::array<Control, 2> controls{};

    static Gate make_not(Wire target);
    static Gate make_cnot(Control control, Wire target);
    static Gate make_toffoli(Control c0, Control c1, Wire target);

    /// All wires touched by the gate (target first).
    [[nodiscard]] std::vector<Wire> wires() const;
};

/// A little-endian group of wires; wires[0] carries place value 2^0.
struct Register {
    std::vector<Wire> wires;

    [[nodiscard]] int width() const { return static_cast<int>(wires.size()); }
    [[nodiscard]] Wire operator[](int bit) const { return wires.at(static_cast<std::size_t>(bit)); }

    /// Sub-register covering bit positions [first, first+count).
    [[nodiscard]] Register slice(int first, int count) const;
};

/// Allocation / deallocation event, interleaved with the gate stream so
/// that the qubit high-water mark can be reconstructed exactly.
struct WireEvent {
    std::size_t gate_index = 0;  ///< event takes effect before this gate
    Wire wire = -1;
    bool alloc = true;
};

/// A reversible circuit: a gate list over dynamically allocated wires.
///
/// Wires allocated while gates are already present start in |0> and must
/// be returned to |0> before free_wire (the simulator enforces both).
/// Wires that hold declared junk at the end are marked via mark_garbage.
class Circuit {
  public:
    Circuit() = default;

    /// Allocates a fresh wire (recycling freed indices when possible).
    Wire add_wire();
    /// Allocates `width` wires as a little-endian register.
    Register add_register(int width);
    /// Releases a wire; it must carry |0> at this point in the stream.
    void free_wire(Wire w);
    void free_register(const Register& r);
    /// Declares that `w` intentionally holds uncomputed junk at the end.
    void mark_garbage(Wire w);

    void add_not(Wire target);
    void add_cnot(Control control, Wire target);
    void add_cnot(Wire control, Wire target) { add_cnot(Control{control, true}, target); }
    void add_toffoli(Control c0, Control c1, Wire target);
    void add_toffoli(Wire c0, Wire c1, Wire target) {
        add_toffoli(Control{c0, true}, Control{c1, true}, target);
    }
    void add_gate(const Gate& g);

    /// Appends all gates of `other` verbatim (wire spaces must match).
    void append(const Circuit& other);
    /// Appends the gates of `other` in reverse order (each gate in the
    /// alphabet is self-inverse, so this is the inverse circuit).
    void append_reversed(const Circuit& other);

    /// The inverse circuit: reversed gate list, allocations hoisted to
    /// the start (a conservative choice that never understates space).
    [[nodiscard]] Circuit reversed() const;

    [[nodiscard]] int wire_count() const { return wire_count_; }
    [[nodiscard]] const std::vector<Gate>& gates() const { return gates_; }
    [[nodiscard]] const std::vector<WireEvent>& wire_events() const { return events_; }
    [[nodiscard]] const std::vector<Wire>& garbage_wires() const { return garbage_; }
    [[nodiscard]] bool is_live(Wire w) const;

    /// Text dump, one gate per line: "TOF a b t", "CNOT a t", "NOT t".
    /// Negative controls are prefixed with '!'.
    void dump(std::ostream& os) const;
    [[nodiscard]] std::string dump() const;

  private:
    void check_control(const Control& c, Wire target) const;
    void check_live(Wire w) const;

    int wire_count_ = 0;
    std::vector<Gate> gates_;
    std::vector<WireEvent> events_;
    std::vector<Wire> garbage_;
    std::vector<bool> live_;
    std::vector<Wire> free_pool_;
};

/// Parses the dump format back into a gate list over `wire_count` wires
/// (used for round-trip tests and external tooling).
[[nodiscard]] Circuit parse_circuit(const std::string& text, int wire_count);

}  // namespace qrev
