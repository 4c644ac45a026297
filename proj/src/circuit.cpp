#include "qrev/circuit.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qrev {

Gate Gate::make_not(Wire target) {
    Gate g;
    g.kind = GateKind::Not;
    g.target = target;
    g.control_count = 0;
    return g;
}

Gate Gate::make_cnot(Control control, Wire target) {
    Gate g;
    g.kind = GateKind::Cnot;
    g.target = target;
    g.control_count = 1;
    g.controls[0] = control;
    return g;
}

Gate Gate::make_toffoli(Control c0, Control c1, Wire target) {
    Gate g;
    g.kind = GateKind::Toffoli;
    g.target = target;
    g.control_count = 2;
    g.controls[0] = c0;
    g.controls[1] = c1;
    return g;
}

std::vector<Wire> Gate::wires() const {
    std::vector<Wire> out{target};
    for (int i = 0; i < control_count; ++i) out.push_back(controls[static_cast<std::size_t>(i)].wire);
    return out;
}

Register Register::slice(int first, int count) const {
    if (first < 0 || count < 0 || first + count > width())
        throw std::invalid_argument("Register::slice: range out of bounds");
    Register r;
    r.wires.assign(wires.begin() + first, wires.begin() + first + count);
    return r;
}

Wire Circuit::add_wire() {
    Wire w;
    if (!free_pool_.empty()) {
        w = free_pool_.back();
        free_pool_.pop_back();
        live_[static_cast<std::size_t>(w)] = true;
    } else {
        w = wire_count_++;
        live_.push_back(true);
    }
    events_.push_back(WireEvent{gates_.size(), w, true});
    return w;
}

Register Circuit::add_register(int width) {
    if (width <= 0) throw std::invalid_argument("add_register: width must be positive");
    Register r;
    r.wires.reserve(static_cast<std::size_t>(width));
    for (int i = 0; i < width; ++i) r.wires.push_back(add_wire());
    return r;
}

void Circuit::free_wire(Wire w) {
    check_live(w);
    events_.push_back(WireEvent{gates_.size(), w, false});
    live_[static_cast<std::size_t>(w)] = false;
    free_pool_.push_back(w);
}

void Circuit::free_register(const Register& r) {
    for (Wire w : r.wires) free_wire(w);
}

void Circuit::mark_garbage(Wire w) {
    check_live(w);
    if (std::find(garbage_.begin(), garbage_.end(), w) == garbage_.end()) garbage_.push_back(w);
}

bool Circuit::is_live(Wire w) const {
    return w >= 0 && w < wire_count_ && live_[static_cast<std::size_t>(w)];
}

void Circuit::check_live(Wire w) const {
    if (!is_live(w)) throw std::invalid_argument("circuit: wire " + std::to_string(w) + " is not live");
}

void Circuit::check_control(const Control& c, Wire target) const {
    check_live(c.wire);
    if (c.wire == target) throw std::invalid_argument("circuit: control coincides with target");
}

void Circuit::add_not(Wire target) {
    check_live(target);
    gates_.push_back(Gate::make_not(target));
}

void Circuit::add_cnot(Control control, Wire target) {
    check_live(target);
    check_control(control, target);
    gates_.push_back(Gate::make_cnot(control, target));
}

void Circuit::add_toffoli(Control c0, Control c1, Wire target) {
    check_live(target);
    check_control(c0, target);
    check_control(c1, target);
    if (c0.wire == c1.wire) throw std::invalid_argument("circuit: duplicate control wire");
    gates_.push_back(Gate::make_toffoli(c0, c1, target));
}

void Circuit::add_gate(const Gate& g) {
    switch (g.kind) {
        case GateKind::Not: add_not(g.target); break;
        case GateKind::Cnot: add_cnot(g.controls[0], g.target); break;
        case GateKind::Toffoli: add_toffoli(g.controls[0], g.controls[1], g.target); break;
    }
}

void Circuit::append(const Circuit& other) {
    for (const Gate& g : other.gates()) add_gate(g);
}

void Circuit::append_reversed(const Circuit& other) {
    const auto& gs = other.gates();
    for (auto it = gs.rbegin(); it != gs.rend(); ++it) add_gate(*it);
}

Circuit Circuit::reversed() const {
    Circuit r;
    // Hoist every wire that was ever live to the front; reversal is used
    // for uncompute passes and equivalence tests where the exact
    // allocation schedule of the inverse is immaterial.
    for (int i = 0; i < wire_count_; ++i) r.add_wire();
    for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) r.add_gate(*it);
    for (Wire w : garbage_) r.mark_garbage(w);
    return r;
}

namespace {

void print_control(std::ostream& os, const Control& c) {
    if (!c.positive) os << '!';
    os << c.wire;
}

}  // namespace

void Circuit::dump(std::ostream& os) const {
    for (const Gate& g : gates_) {
        switch (g.kind) {
            case GateKind::Not:
                os << "NOT " << g.target << '\n';
                break;
            case GateKind::Cnot:
                os << "CNOT ";
                print_control(os, g.controls[0]);
                os << ' ' << g.target << '\n';
                break;
            case GateKind::Toffoli:
                os << "TOF ";
                print_control(os, g.controls[0]);
                os << ' ';
                print_control(os, g.controls[1]);
                os << ' ' << g.target << '\n';
                break;
        }
    }
}

std::string Circuit::dump() const {
    std::ostringstream os;
    dump(os);
    return os.str();
}

Circuit parse_circuit(const std::string& text, int wire_count) {
    Circuit c;
    for (int i = 0; i < wire_count; ++i) c.add_wire();
    std::istringstream in(text);
    std::string line;
    auto parse_control = [](const std::string& tok) {
        Control ctl;
        std::size_t pos = 0;
        if (!tok.empty() && tok[0] == '!') {
            ctl.positive = false;
            pos = 1;
        }
        ctl.wire = std::stoi(tok.substr(pos));
        return ctl;
    };
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string op;
        if (!(ls >> op)) continue;  // blank line
        if (op == "NOT") {
            Wire t;
            if (!(ls >> t)) throw std::runtime_error("parse_circuit: bad NOT at line " + std::to_string(lineno));
            c.add_not(t);
        } else if (op == "CNOT") {
            std::string ctl;
            Wire t;
            if (!(ls >> ctl >> t)) throw std::runtime_error("parse_circuit: bad CNOT at line " + std::to_string(lineno));
            c.add_cnot(parse_control(ctl), t);
        } else if (op == "TOF") {
            std::string c0, c1;
            Wire t;
            if (!(ls >> c0 >> c1 >> t)) throw std::runtime_error("parse_circuit: bad TOF at line " + std::to_string(lineno));
            c.add_toffoli(parse_control(c0), parse_control(c1), t);
        } else {
            throw std::runtime_error("parse_circuit: unknown op '" + op + "' at line " + std::to_string(lineno));
        }
    }
    return c;
}

}  // namespace qrev
