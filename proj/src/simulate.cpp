#include "qrev/simulate.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace qrev {

void encode_register(BasisState& s, const Register& r, std::uint64_t value) {
    if (r.width() < 64 && (value >> r.width()) != 0)
        throw std::invalid_argument("encode_register: value does not fit register");
    for (int i = 0; i < r.width(); ++i) s.set(r[i], (value >> i) & 1u);
}

std::uint64_t decode_register(const BasisState& s, const Register& r) {
    if (r.width() > 64) throw std::invalid_argument("decode_register: register wider than 64 bits");
    std::uint64_t v = 0;
    for (int i = 0; i < r.width(); ++i)
        if (s.get(r[i])) v |= (std::uint64_t{1} << i);
    return v;
}

namespace {

bool control_fires(const BasisState& s, const Control& c) {
    return s.get(c.wire) == c.positive;
}

void apply_gate(BasisState& s, const Gate& g) {
    switch (g.kind) {
        case GateKind::Not:
            s.set(g.target, !s.get(g.target));
            break;
        case GateKind::Cnot:
            if (control_fires(s, g.controls[0])) s.set(g.target, !s.get(g.target));
            break;
        case GateKind::Toffoli:
            if (control_fires(s, g.controls[0]) && control_fires(s, g.controls[1]))
                s.set(g.target, !s.get(g.target));
            break;
    }
}

}  // namespace

BasisState simulate(const Circuit& c, BasisState state, bool strict) {
    if (static_cast<int>(state.bits.size()) != c.wire_count())
        throw std::invalid_argument("simulate: state width does not match circuit");
    const auto& events = c.wire_events();
    std::size_t next_event = 0;
    // Wires live before the first gate are primary inputs; their alloc
    // events carry gate_index 0 and must not force the input to zero.
    const auto& gates = c.gates();
    for (std::size_t gi = 0; gi <= gates.size(); ++gi) {
        while (next_event < events.size() && events[next_event].gate_index == gi) {
            const WireEvent& ev = events[next_event];
            if (strict && state.get(ev.wire)) {
                const bool primary = ev.alloc && ev.gate_index == 0;
                if (!primary)
                    throw std::runtime_error("simulate: wire " + std::to_string(ev.wire) +
                                             (ev.alloc ? " allocated" : " freed") +
                                             " while nonzero (gate " + std::to_string(gi) + ")");
            }
            ++next_event;
        }
        if (gi < gates.size()) apply_gate(state, gates[gi]);
    }
    return state;
}

CostReport cost(const Circuit& c) {
    CostReport r;
    r.garbage_count = static_cast<int>(c.garbage_wires().size());

    std::vector<long long> wire_time(static_cast<std::size_t>(c.wire_count()), 0);
    for (const Gate& g : c.gates()) {
        long long t = wire_time[static_cast<std::size_t>(g.target)];
        for (int i = 0; i < g.control_count; ++i)
            t = std::max(t, wire_time[static_cast<std::size_t>(g.controls[static_cast<std::size_t>(i)].wire)]);
        const bool timed = (g.kind == GateKind::Toffoli);
        if (timed) {
            ++r.toffoli_count;
            ++t;
        }
        wire_time[static_cast<std::size_t>(g.target)] = t;
        for (int i = 0; i < g.control_count; ++i)
            wire_time[static_cast<std::size_t>(g.controls[static_cast<std::size_t>(i)].wire)] = t;
    }
    for (long long t : wire_time) r.toffoli_depth = std::max(r.toffoli_depth, t);

    // High-water from the event stream: alloc raises, free lowers.
    int active = 0;
    for (const WireEvent& ev : c.wire_events()) {
        active += ev.alloc ? 1 : -1;
        r.qubit_highwater = std::max(r.qubit_highwater, active);
    }
    return r;
}

bool check_reversibility(const Circuit& c, std::uint64_t max_states) {
    std::vector<Wire> primary;
    for (const WireEvent& ev : c.wire_events())
        if (ev.alloc && ev.gate_index == 0) primary.push_back(ev.wire);
    if (primary.size() >= 63 || (std::uint64_t{1} << primary.size()) > max_states)
        throw std::invalid_argument("check_reversibility: input space too large");

    std::map<std::vector<std::uint8_t>, std::uint64_t> seen;
    const std::uint64_t total = std::uint64_t{1} << primary.size();
    for (std::uint64_t x = 0; x < total; ++x) {
        BasisState in(c.wire_count());
        for (std::size_t i = 0; i < primary.size(); ++i) in.set(primary[i], (x >> i) & 1u);
        BasisState out;
        try {
            out = simulate(c, in);
        } catch (const std::runtime_error&) {
            return false;  // ancilla discipline violated on this input
        }
        auto [it, inserted] = seen.emplace(out.bits, x);
        if (!inserted) return false;
    }
    return true;
}

}  // namespace qrev
