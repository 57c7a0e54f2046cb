#include "dirac_cli/documents.hpp"

#include <cmath>
#include <map>
#include <set>

#include "dirac/errors.hpp"
#include "dirac/io.hpp"
#include "dirac/ph_library.hpp"

namespace dirac::cli {

namespace {

[[noreturn]] void bad(const std::string& what) { throw ParseError(what); }

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) bad(where + " must be an object");
    const auto it = obj.find(key);
    if (it == obj.end()) bad(where + " is missing '" + key + "'");
    return *it;
}

const json* optional(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::string string_of(const json& j, const std::string& where) {
    if (!j.is_string()) bad(where + " must be a string");
    return j.get<std::string>();
}

double real_of(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        return io::rat_from_json(j).get_d();
    }
    bad(where + " must be a number or a rational string");
}

std::size_t count_of(const json& j, const std::string& where) {
    if (!j.is_number_unsigned()) bad(where + " must be a non-negative integer");
    return j.get<std::size_t>();
}

const json& array_of(const json& j, const std::string& where) {
    if (!j.is_array()) bad(where + " must be an array");
    return j;
}

Eigen::VectorXd real_vector(const json& j, const std::string& where) {
    array_of(j, where);
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = real_of(j[i], where);
    return v;
}

Eigen::MatrixXd real_matrix(const json& j, const std::string& where, Eigen::Index cols_if_empty) {
    array_of(j, where);
    if (j.empty()) return Eigen::MatrixXd(0, cols_if_empty);
    const std::size_t cols = array_of(j[0], where).size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (array_of(j[r], where).size() != cols) throw DimensionError(where + " has rows of different lengths");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = real_of(j[r][c], where);
    }
    return m;
}

void unique_name(std::set<std::string>& seen, const std::string& name, const std::string& what) {
    if (name.empty()) bad(what + " names must be non-empty");
    if (!seen.insert(name).second) bad("duplicate " + what + " name '" + name + "'");
}

BondTable read_bonds(const json& doc, bool scalar_only) {
    BondTable t;
    std::set<std::string> seen;
    const json* bonds = optional(doc, "bonds");
    if (!bonds) return t;
    for (const auto& b : array_of(*bonds, "'bonds'")) {
        std::string name;
        std::size_t dim = 1;
        if (b.is_string()) {
            name = b.get<std::string>();
        } else {
            name = string_of(field(b, "name", "a bond"), "bond name");
            if (const json* d = optional(b, "dim")) dim = count_of(*d, "bond '" + name + "' dim");
        }
        unique_name(seen, name, "bond");
        if (scalar_only && dim != 1) throw DimensionError("bond '" + name + "' must be scalar in a port-Hamiltonian diagram");
        t.names.push_back(name);
        t.dims.push_back(dim);
    }
    return t;
}

std::vector<std::size_t> bond_list(const BondTable& t, const json& j, const std::string& owner) {
    std::vector<std::size_t> out;
    for (const auto& b : array_of(j, "ports of " + owner)) out.push_back(t.index(string_of(b, "bond reference"), owner));
    return out;
}

lin::Rat rat_param(const json& params, const char* key, const lin::Rat& fallback) {
    const json* v = optional(params, key);
    return v ? io::rat_from_json(*v) : fallback;
}

void allowed_keys(const json& params, std::initializer_list<const char*> keys, const std::string& owner) {
    for (const auto& [k, v] : params.items()) {
        bool ok = false;
        for (const char* allowed : keys) ok = ok || k == allowed;
        if (!ok) throw DomainError(owner + ": unknown parameter '" + k + "'");
    }
}

DiracRelation resolve_relation(const BondTable& bonds, const json& box, const std::string& name,
                               const std::vector<std::size_t>& dom, const std::vector<std::size_t>& cod) {
    static const json empty = json::object();
    const json* pp = optional(box, "params");
    const json& params = pp ? *pp : empty;
    if (!params.is_object()) bad("params of box '" + name + "' must be an object");
    if (const json* lib = optional(box, "library")) {
        const std::string which = string_of(*lib, "library name");
        const std::string owner = "box '" + name + "'";
        if (which == "motor") {
            allowed_keys(params, {"kappa"}, owner);
            return ph::motor(rat_param(params, "kappa", 1));
        }
        if (which == "pump") {
            allowed_keys(params, {"rho"}, owner);
            return ph::pump(rat_param(params, "rho", 1));
        }
        if (which == "transformer") {
            allowed_keys(params, {"ratio", "dim"}, owner);
            const std::size_t d = optional(params, "dim") ? count_of(params["dim"], "transformer dim") : 1;
            return transformer(rat_param(params, "ratio", 1), d);
        }
        bad(owner + " refers to unknown library relation '" + which + "'");
    }
    if (const json* junction = optional(box, "junction")) {
        const std::string type = string_of(*junction, "junction type");
        JunctionType jt;
        if (type == "zero") jt = JunctionType::zero;
        else if (type == "one") jt = JunctionType::one;
        else bad("junction '" + name + "' has unknown type '" + type + "' (expected zero or one)");
        std::size_t d = 0;
        bool first = true;
        for (const auto* side : {&dom, &cod})
            for (std::size_t b : *side) {
                if (first) d = bonds.dims[b];
                else if (bonds.dims[b] != d)
                    throw DimensionError("junction '" + name + "' joins bonds of different dimensions");
                first = false;
            }
        if (first) d = 1;
        return make_junction(jt, dom.size(), cod.size(), d);
    }
    if (const json* rel = optional(box, "relation")) return io::relation_from_json(*rel);
    bad("box '" + name + "' needs one of 'library', 'junction' or 'relation'");
}

std::vector<NetworkBox> read_boxes(const BondTable& bonds, const json& doc, std::set<std::string>& names) {
    std::vector<NetworkBox> boxes;
    const json* list = optional(doc, "relations");
    if (!list) return boxes;
    for (const auto& box : array_of(*list, "'relations'")) {
        const std::string name = string_of(field(box, "name", "a relation box"), "relation name");
        unique_name(names, name, "box");
        const auto dom = bond_list(bonds, field(box, "dom", "box '" + name + "'"), "box '" + name + "'");
        const auto cod = bond_list(bonds, field(box, "cod", "box '" + name + "'"), "box '" + name + "'");
        try {
            boxes.push_back({name, resolve_relation(bonds, box, name, dom, cod), dom, cod});
        } catch (const DiracCheckError& e) {
            throw DiracCheckError("box '" + name + "': " + e.what());
        } catch (const DimensionError& e) {
            throw DimensionError("box '" + name + "': " + e.what());
        }
    }
    return boxes;
}

ph::PHSystem raw_system(const json& raw, const std::string& name) {
    const Eigen::MatrixXd Q = real_matrix(field(raw, "Q", "raw system '" + name + "'"), "Q", 0);
    const Eigen::Index n = Q.rows();
    if (Q.cols() != n) throw DimensionError("raw system '" + name + "': Q must be square");
    if ((Q - Q.transpose()).norm() > 1e-12 * (1 + Q.norm()))
        throw DomainError("raw system '" + name + "': Q must be symmetric");
    ph::KernelRep k{real_matrix(field(raw, "F", "raw system '" + name + "'"), "F", n),
                    real_matrix(field(raw, "E", "raw system '" + name + "'"), "E", n),
                    real_matrix(field(raw, "G", "raw system '" + name + "'"), "G", 0)};
    ph::Boundary boundary;
    if (const json* dual = optional(raw, "dual")) {
        for (const auto& d : array_of(*dual, "dual flags")) {
            if (!d.is_boolean()) bad("dual flags must be booleans");
            boundary.dual.push_back(d.get<bool>());
        }
    } else {
        boundary = ph::Boundary::plain(static_cast<std::size_t>(k.G.cols() / 2));
    }
    const Eigen::Index rows = n + static_cast<Eigen::Index>(boundary.ports());
    if (k.F.cols() != n || k.E.cols() != n || k.G.cols() != static_cast<Eigen::Index>(boundary.dim()) ||
        k.F.rows() != rows || k.E.rows() != rows || (k.G.rows() != rows && k.G.size() != 0))
        throw DimensionError("raw system '" + name + "': F, E, G must have " + std::to_string(rows) +
                             " rows and " + std::to_string(n) + ", " + std::to_string(n) + ", " +
                             std::to_string(boundary.dim()) + " columns");
    if (k.G.rows() != rows) k.G = Eigen::MatrixXd::Zero(rows, 0);
    try {
        ph::check_kernel(k, static_cast<std::size_t>(n), boundary);
    } catch (const DiracCheckError& e) {
        throw DiracCheckError("raw system '" + name + "': " + e.what());
    }
    ph::PHSystem s;
    s.name = name;
    s.state_dim = static_cast<std::size_t>(n);
    s.boundary = boundary;
    s.H = [Q](const Eigen::VectorXd& x) { return 0.5 * x.dot(Q * x); };
    s.grad_H = [Q](const Eigen::VectorXd& x) { return Eigen::VectorXd(Q * x); };
    s.D = [k](const Eigen::VectorXd&) { return k; };
    return s;
}

ph::PortInput port_input(const json& j, std::size_t index) {
    const std::string where = "input " + std::to_string(index);
    const std::string kind = string_of(field(j, "kind", where), where + " kind");
    std::function<double(double)> value;
    const json& v = field(j, "value", where);
    if (v.is_object()) {
        const double offset = optional(v, "offset") ? real_of(v["offset"], where) : 0.0;
        const double amplitude = optional(v, "amplitude") ? real_of(v["amplitude"], where) : 0.0;
        const double omega = optional(v, "omega") ? real_of(v["omega"], where) : 0.0;
        const double phase = optional(v, "phase") ? real_of(v["phase"], where) : 0.0;
        value = [=](double t) { return offset + amplitude * std::sin(omega * t + phase); };
    } else {
        const double c = real_of(v, where);
        value = [c](double) { return c; };
    }
    if (kind == "effort") return ph::PortInput::effort(std::move(value));
    if (kind == "flow") return ph::PortInput::flow(std::move(value));
    bad(where + " kind must be 'effort' or 'flow'");
}

} // namespace

std::size_t BondTable::index(const std::string& name, const std::string& owner) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    bad(owner + " refers to unknown bond '" + name + "'");
}

DocKind doc_kind(const json& doc) {
    const std::string kind = string_of(field(doc, "kind", "the document"), "'kind'");
    if (kind == "dirac" || kind == "dirac-relation") return DocKind::dirac;
    if (kind == "ph" || kind == "ph-system") return DocKind::ph;
    if (kind == "thermo" || kind == "thermo-system") return DocKind::thermo;
    if (kind == "uwd" || kind == "uwd-operation") return DocKind::uwd;
    bad("unknown document kind '" + kind + "'");
}

const json& source_of(const json& doc) {
    const std::string kind = string_of(field(doc, "kind", "the document"), "'kind'");
    if (kind.find('-') != std::string::npos) return field(doc, "source", "a composed document");
    return doc;
}

DiracDiagram compile_dirac(const json& doc) {
    DiracDiagram out;
    out.bonds = read_bonds(doc, false);
    std::set<std::string> names;
    const auto boxes = read_boxes(out.bonds, doc, names);
    std::vector<ExposedBond> dom, cod;
    if (const json* outer = optional(doc, "outer")) {
        for (const char* side : {"dom", "cod"}) {
            const json* list = optional(*outer, side);
            if (!list) continue;
            for (const auto& p : array_of(*list, std::string("outer ") + side)) {
                ExposedBond e;
                e.bond = out.bonds.index(string_of(field(p, "bond", "an outer port"), "outer bond"), "the outer box");
                if (const json* d = optional(p, "dual")) {
                    if (!d->is_boolean()) bad("outer 'dual' must be a boolean");
                    e.dual = d->get<bool>();
                }
                (std::string(side) == "dom" ? dom : cod).push_back(e);
            }
        }
    }
    out.relation = interconnect(out.bonds.dims, boxes, dom, cod);
    return out;
}

PHDiagram compile_ph(const json& doc) {
    PHDiagram out;
    out.bonds = read_bonds(doc, true);
    std::set<std::string> names;
    out.system = ph::ph_unit();
    std::vector<ExposedBond> dom;
    bool first = true;
    if (const json* systems = optional(doc, "systems")) {
        for (const auto& s : array_of(*systems, "'systems'")) {
            const std::string name = string_of(field(s, "name", "a system"), "system name");
            unique_name(names, name, "box");
            ph::PHSystem sys;
            if (const json* lib = optional(s, "library")) {
                ph::Params params;
                if (const json* p = optional(s, "params")) {
                    if (!p->is_object()) bad("params of system '" + name + "' must be an object");
                    for (const auto& [k, v] : p->items()) params[k] = real_of(v, "parameter '" + k + "'");
                }
                const std::string which = string_of(*lib, "library name");
                if (!ph::is_library_system(which)) bad("system '" + name + "' refers to unknown library system '" + which + "'");
                sys = ph::library_system(which, params);
            } else if (const json* raw = optional(s, "raw")) {
                sys = raw_system(*raw, name);
            } else {
                bad("system '" + name + "' needs 'library' or 'raw'");
            }
            sys.name = name;
            const auto ports = bond_list(out.bonds, field(s, "ports", "system '" + name + "'"), "system '" + name + "'");
            if (ports.size() != sys.boundary.ports())
                throw DimensionError("system '" + name + "' has " + std::to_string(sys.boundary.ports()) +
                                     " ports but the diagram attaches " + std::to_string(ports.size()));
            for (std::size_t i = 0; i < ports.size(); ++i) dom.push_back({ports[i], static_cast<bool>(sys.boundary.dual[i])});
            out.system = first ? sys : ph::ph_tensor(out.system, sys);
            first = false;
        }
    }
    const auto boxes = read_boxes(out.bonds, doc, names);
    std::vector<ExposedBond> cod;
    if (const json* outer = optional(doc, "outer")) {
        for (const auto& p : array_of(*outer, "'outer'")) {
            PortSpec spec;
            spec.bond = string_of(field(p, "bond", "an outer port"), "outer bond");
            const std::string dir = optional(p, "dir") ? string_of(p["dir"], "outer 'dir'") : "in";
            if (dir != "in" && dir != "out") bad("outer port '" + spec.bond + "' dir must be 'in' or 'out'");
            spec.out = dir == "out";
            cod.push_back({out.bonds.index(spec.bond, "the outer box"), spec.out});
            out.outer.push_back(spec);
        }
    }
    out.relation = interconnect(out.bonds.dims, boxes, dom, cod);
    const std::string name = optional(doc, "name") ? string_of(doc["name"], "'name'") : std::string("composite");
    out.system = ph::ph_apply_relation(out.system, out.relation);
    out.system.name = name;

    const auto n = static_cast<Eigen::Index>(out.system.state_dim);
    out.x0 = Eigen::VectorXd::Zero(n);
    if (const json* sim = optional(doc, "simulate")) {
        if (const json* x0 = optional(*sim, "x0")) out.x0 = real_vector(*x0, "x0");
        if (out.x0.size() != n)
            throw DimensionError("x0 has " + std::to_string(out.x0.size()) + " entries for " + std::to_string(n) + " states");
        if (const json* inputs = optional(*sim, "inputs"))
            for (const auto& in : array_of(*inputs, "'inputs'")) out.inputs.push_back(port_input(in, out.inputs.size()));
        if (const json* samples = optional(*sim, "samples"))
            for (const auto& s : array_of(*samples, "'samples'")) {
                out.samples.push_back(real_vector(s, "sample state"));
                if (out.samples.back().size() != n) throw DimensionError("sample state has the wrong dimension");
            }
    }
    if (out.samples.empty()) out.samples.push_back(out.x0);
    return out;
}

thermo::ConvexDomain domain_from_json(const json& j) {
    std::vector<thermo::Factor> factors;
    for (const auto& f : array_of(j, "a domain")) {
        if (!f.is_object() || f.size() != 1) bad("each domain factor must be an object with one key");
        const std::string key = f.begin().key();
        const json& val = f.begin().value();
        thermo::Factor factor;
        if (key == "reals") factor = {thermo::Factor::Kind::reals, count_of(val, "reals"), 0, 0};
        else if (key == "positive") factor = {thermo::Factor::Kind::positive, count_of(val, "positive"), 0, 0};
        else if (key == "simplex") factor = {thermo::Factor::Kind::simplex, count_of(val, "simplex"), 0, 0};
        else if (key == "interval") {
            if (!val.is_array() || val.size() != 2) bad("interval must be [lo, hi]");
            factor = {thermo::Factor::Kind::interval, 1, real_of(val[0], "interval"), real_of(val[1], "interval")};
        } else
            bad("unknown domain factor '" + key + "'");
        if (factor.dim > 0) factors.push_back(factor);
    }
    return thermo::ConvexDomain(std::move(factors));
}

json domain_json(const thermo::ConvexDomain& d) {
    json out = json::array();
    for (const auto& f : d.factors()) {
        switch (f.kind) {
        case thermo::Factor::Kind::reals: out.push_back({{"reals", f.dim}}); break;
        case thermo::Factor::Kind::positive: out.push_back({{"positive", f.dim}}); break;
        case thermo::Factor::Kind::simplex: out.push_back({{"simplex", f.dim}}); break;
        case thermo::Factor::Kind::interval: out.push_back({{"interval", {number(f.lo), number(f.hi)}}}); break;
        }
    }
    return out;
}

namespace {

thermo::ThermoSystem thermo_library(const std::string& which, const json& params, const std::string& name) {
    const std::string owner = "system '" + name + "'";
    auto get = [&](const char* key, double fallback) {
        const json* v = optional(params, key);
        return v ? real_of(*v, owner + " parameter " + key) : fallback;
    };
    if (which == "heat_capacity") {
        allowed_keys(params, {"C"}, owner);
        return thermo::heat_capacity(get("C", 1));
    }
    if (which == "heat_bath") {
        allowed_keys(params, {"T"}, owner);
        return thermo::heat_bath(get("T", 1));
    }
    if (which == "pressure_bath") {
        allowed_keys(params, {"p", "T"}, owner);
        return thermo::pressure_bath(get("p", 1), get("T", 1));
    }
    if (which == "shannon") {
        allowed_keys(params, {"n"}, owner);
        const json* n = optional(params, "n");
        return thermo::shannon(n ? count_of(*n, owner + " parameter n") : 2);
    }
    if (which == "ideal_mixture") {
        allowed_keys(params, {"s0", "c"}, owner);
        std::vector<double> s0;
        for (const auto& v : array_of(field(params, "s0", owner + " params"), "s0")) s0.push_back(real_of(v, "s0"));
        return thermo::ideal_mixture(std::move(s0), get("c", 1.5));
    }
    bad(owner + " refers to unknown thermostatic library system '" + which + "'");
}

} // namespace

ThermoDiagram compile_thermo(const json& doc) {
    ThermoDiagram out;
    std::set<std::string> seen;
    std::vector<std::size_t> offsets;
    std::size_t x_dim = 0;
    if (const json* systems = optional(doc, "systems")) {
        for (const auto& s : array_of(*systems, "'systems'")) {
            const std::string name = string_of(field(s, "name", "a system"), "system name");
            unique_name(seen, name, "system");
            static const json empty = json::object();
            const json* p = optional(s, "params");
            if (p && !p->is_object()) bad("params of system '" + name + "' must be an object");
            thermo::ThermoSystem sys =
                thermo_library(string_of(field(s, "library", "system '" + name + "'"), "library name"), p ? *p : empty, name);
            sys.name = name;
            offsets.push_back(x_dim);
            x_dim += sys.domain.dim();
            out.names.push_back(name);
            out.systems.push_back(std::move(sys));
        }
    }
    if (const json* outer = optional(doc, "outer")) out.outer = domain_from_json(*outer);
    const auto nx = static_cast<Eigen::Index>(x_dim), ny = static_cast<Eigen::Index>(out.outer.dim());
    std::vector<Eigen::VectorXd> arows, brows;
    std::vector<double> cs;
    if (const json* constraints = optional(doc, "constraints")) {
        for (const auto& row : array_of(*constraints, "'constraints'")) {
            const std::string where = "constraint " + std::to_string(arows.size());
            Eigen::VectorXd a = Eigen::VectorXd::Zero(nx), b = Eigen::VectorXd::Zero(ny);
            if (const json* x = optional(row, "x")) {
                if (!x->is_object()) bad(where + ": 'x' must map system names to coefficient lists");
                for (const auto& [sys, coeffs] : x->items()) {
                    const auto it = std::find(out.names.begin(), out.names.end(), sys);
                    if (it == out.names.end()) bad(where + " refers to unknown system '" + sys + "'");
                    const auto k = static_cast<std::size_t>(it - out.names.begin());
                    const Eigen::VectorXd v = real_vector(coeffs, where);
                    if (static_cast<std::size_t>(v.size()) != out.systems[k].domain.dim())
                        throw DimensionError(where + ": system '" + sys + "' has " +
                                             std::to_string(out.systems[k].domain.dim()) + " coordinates, got " +
                                             std::to_string(v.size()) + " coefficients");
                    a.segment(static_cast<Eigen::Index>(offsets[k]), v.size()) = v;
                }
            }
            if (const json* y = optional(row, "y")) {
                b = real_vector(*y, where);
                if (b.size() != ny)
                    throw DimensionError(where + ": 'y' has " + std::to_string(b.size()) + " coefficients for " +
                                         std::to_string(ny) + " outer coordinates");
            }
            arows.push_back(a);
            brows.push_back(b);
            cs.push_back(optional(row, "c") ? real_of(row["c"], where) : 0.0);
        }
    }
    const auto m = static_cast<Eigen::Index>(arows.size());
    out.relation.x_dim = x_dim;
    out.relation.y_dim = static_cast<std::size_t>(ny);
    out.relation.A = Eigen::MatrixXd(m, nx);
    out.relation.B = Eigen::MatrixXd(m, ny);
    out.relation.c = Eigen::VectorXd(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        out.relation.A.row(i) = arows[static_cast<std::size_t>(i)].transpose();
        out.relation.B.row(i) = brows[static_cast<std::size_t>(i)].transpose();
        out.relation.c(i) = cs[static_cast<std::size_t>(i)];
    }
    if (const json* queries = optional(doc, "queries"))
        for (const auto& q : array_of(*queries, "'queries'")) {
            out.queries.push_back(real_vector(q, "query point"));
            if (out.queries.back().size() != ny) throw DimensionError("query point has the wrong dimension");
        }
    if (const json* g = optional(doc, "gibbs")) {
        out.has_gibbs = true;
        out.gibbs_system = string_of(field(*g, "system", "'gibbs'"), "gibbs system");
        if (std::find(out.names.begin(), out.names.end(), out.gibbs_system) == out.names.end())
            bad("'gibbs' refers to unknown system '" + out.gibbs_system + "'");
        out.T = real_of(field(*g, "T", "'gibbs'"), "gibbs T");
        out.p = real_of(field(*g, "p", "'gibbs'"), "gibbs p");
        out.network = thermo::parse_reactions(string_of(field(*g, "reactions", "'gibbs'"), "gibbs reactions"));
        out.N0 = real_vector(field(*g, "N0", "'gibbs'"), "N0");
    }
    return out;
}

UwdDiagram compile_uwd(const json& doc) {
    UwdDiagram out;
    out.operation = io::uwd_from_json(field(doc, "operation", "a uwd document"));
    if (const json* subs = optional(doc, "substitutions"))
        for (const auto& s : array_of(*subs, "'substitutions'")) {
            const std::size_t slot = count_of(field(s, "slot", "a substitution"), "slot");
            if (slot >= out.operation.arity())
                throw DimensionError("substitution slot " + std::to_string(slot) + " but the operation has " +
                                     std::to_string(out.operation.arity()) + " boxes");
            out.operation = operad::uwd_substitute(out.operation, slot,
                                                   io::uwd_from_json(field(s, "operation", "a substitution")));
        }
    if (const json* graphs = optional(doc, "graphs"))
        for (const auto& g : array_of(*graphs, "'graphs'")) out.graphs.push_back(io::open_graph_from_json(g));
    return out;
}

json number(double x) {
    if (std::isfinite(x)) return x;
    return io::format_double(x);
}

json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
    return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
    return out;
}

} // namespace dirac::cli
