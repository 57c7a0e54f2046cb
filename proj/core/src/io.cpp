#include "dirac/io.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "dirac/errors.hpp"

namespace dirac::io {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc()) throw Error("format_double: conversion failed");
    return std::string(buf.data(), end);
}

lin::Rat rat_from_double(double x) {
    if (!std::isfinite(x)) throw DomainError("cannot convert a non-finite number to a rational");
    return lin::parse_rat(format_double(x));
}

json to_json(const lin::Rat& r) { return lin::to_string(r); }

json to_json(const lin::Mat& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (const auto& v : m.row(r)) row.push_back(lin::to_string(v));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const lin::Subspace& s) { return {{"ambient", s.ambient()}, {"basis", to_json(s.basis())}}; }

namespace {

// Detects a sum of scalar ports (each ±½ on its own (e, f) block).
bool scalar_ports(const BondSpace& b, std::vector<bool>& dual) {
    const lin::Mat& p = b.pform();
    for (std::size_t i = 0; i < b.half_dim(); ++i) {
        const std::size_t e = 2 * i, f = e + 1;
        const lin::Rat& c = p(e, f);
        if (c != lin::Rat(1, 2) && c != lin::Rat(-1, 2)) return false;
        for (std::size_t k = 0; k < b.dim(); ++k)
            if ((k != f && p(e, k) != 0) || (k != e && p(f, k) != 0)) return false;
        dual.push_back(c < 0);
    }
    return true;
}

} // namespace

json to_json(const BondSpace& b) {
    const std::size_t n = b.half_dim();
    if (n > 1 || n == 0) {
        if (b == BondSpace::standard(n)) return {{"std", n}, {"dual", false}};
        if (b == BondSpace::standard(n, true)) return {{"std", n}, {"dual", true}};
    }
    std::vector<bool> dual;
    if (scalar_ports(b, dual)) {
        if (n == 1) return {{"std", 1}, {"dual", static_cast<bool>(dual[0])}};
        json flags = json::array();
        for (bool d : dual) flags.push_back(d);
        return {{"ports", flags}};
    }
    return {{"dim", b.dim()}, {"pform", to_json(b.pform())}};
}

json to_json(const DiracRelation& r) {
    return {{"dom", to_json(r.dom())}, {"cod", to_json(r.cod())}, {"basis", to_json(r.sub().basis())}};
}

json to_json(const operad::FinCospan& c) {
    return {{"left", c.left()}, {"right", c.right()}, {"apex", c.apex()}};
}

json to_json(const operad::UwdOperation& op) {
    json boxes = json::array();
    std::size_t p = 0;
    for (auto k : op.inner()) {
        std::vector<std::size_t> ports(op.wiring().left().begin() + static_cast<std::ptrdiff_t>(p),
                                       op.wiring().left().begin() + static_cast<std::ptrdiff_t>(p + k));
        boxes.push_back({{"ports", ports}});
        p += k;
    }
    return {{"boxes", boxes}, {"junctions", op.wiring().apex()}, {"outer", op.wiring().right()}};
}

json to_json(const operad::OpenGraph& g) {
    json edges = json::array();
    for (std::size_t e = 0; e < g.edges(); ++e) edges.push_back({g.src[e], g.tgt[e]});
    return {{"vertices", g.vertices}, {"edges", edges}, {"iface", g.iface}};
}

// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void bad(const std::string& what) { throw ParseError(what); }

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::size_t count_from_json(const json& j, const char* what) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
        bad(std::string(what) + " must be a non-negative integer");
    return j.get<std::size_t>();
}

std::vector<std::size_t> indices_from_json(const json& j, const char* what) {
    if (!j.is_array()) bad(std::string(what) + " must be an array");
    std::vector<std::size_t> out;
    for (const auto& x : j) out.push_back(count_from_json(x, what));
    return out;
}

} // namespace

lin::Rat rat_from_json(const json& j) {
    if (j.is_string()) return lin::parse_rat(j.get<std::string>());
    if (j.is_number_integer()) return lin::Rat(j.get<long>());
    if (j.is_number_float()) return rat_from_double(j.get<double>());
    bad("expected a rational (string or number)");
}

lin::Mat mat_from_json(const json& j) {
    if (!j.is_array()) bad("matrix must be an array of rows");
    std::vector<lin::Vec> rows;
    std::size_t cols = 0;
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array()) bad("matrix row must be an array");
        if (r == 0) cols = j[r].size();
        if (j[r].size() != cols) throw DimensionError("matrix rows have different lengths");
        lin::Vec row;
        for (const auto& x : j[r]) row.push_back(rat_from_json(x));
        rows.push_back(std::move(row));
    }
    return lin::Mat::from_rows(rows, cols);
}

BondSpace bond_from_json(const json& j) {
    if (!j.is_object()) bad("bond space must be an object");
    if (j.contains("std")) {
        const bool dual = j.contains("dual") && j.at("dual").get<bool>();
        return BondSpace::standard(count_from_json(j.at("std"), "std"), dual);
    }
    if (j.contains("ports")) {
        BondSpace out;
        for (const auto& d : j.at("ports")) {
            if (!d.is_boolean()) bad("'ports' must list booleans");
            out = bond::direct_sum(out, BondSpace::standard(1, d.get<bool>()));
        }
        return out;
    }
    const std::size_t dim = count_from_json(field(j, "dim"), "dim");
    lin::Mat p = mat_from_json(field(j, "pform"));
    if (p.rows() != dim || p.cols() != dim) throw DimensionError("pform does not match 'dim'");
    return BondSpace(std::move(p));
}

DiracRelation relation_from_json(const json& j) {
    BondSpace dom = bond_from_json(field(j, "dom"));
    BondSpace cod = bond_from_json(field(j, "cod"));
    lin::Mat basis = mat_from_json(field(j, "basis"));
    const std::size_t n = dom.dim() + cod.dim();
    if (basis.rows() > 0 && basis.cols() != n)
        throw DimensionError("relation basis has " + std::to_string(basis.cols()) + " columns, expected " +
                             std::to_string(n));
    if (basis.rows() == 0) basis = lin::Mat(0, n);
    return DiracRelation(std::move(dom), std::move(cod), lin::Subspace::span(n, basis));
}

operad::FinCospan cospan_from_json(const json& j) {
    return {indices_from_json(field(j, "left"), "left"), indices_from_json(field(j, "right"), "right"),
            count_from_json(field(j, "apex"), "apex")};
}

operad::UwdOperation uwd_from_json(const json& j) {
    const std::size_t junctions = count_from_json(field(j, "junctions"), "junctions");
    std::vector<std::size_t> inner, left;
    const json& boxes = field(j, "boxes");
    if (!boxes.is_array()) bad("'boxes' must be an array");
    for (const auto& box : boxes) {
        auto ports = indices_from_json(field(box, "ports"), "ports");
        inner.push_back(ports.size());
        left.insert(left.end(), ports.begin(), ports.end());
    }
    auto outer = indices_from_json(field(j, "outer"), "outer");
    const std::size_t n_outer = outer.size();
    return {std::move(inner), n_outer, operad::FinCospan(std::move(left), std::move(outer), junctions)};
}

operad::OpenGraph open_graph_from_json(const json& j) {
    operad::OpenGraph g;
    g.vertices = count_from_json(field(j, "vertices"), "vertices");
    const json& edges = field(j, "edges");
    if (!edges.is_array()) bad("'edges' must be an array");
    for (const auto& e : edges) {
        if (!e.is_array() || e.size() != 2) bad("each edge must be a [source, target] pair");
        g.src.push_back(count_from_json(e[0], "edge source"));
        g.tgt.push_back(count_from_json(e[1], "edge target"));
    }
    g.iface = indices_from_json(field(j, "iface"), "iface");
    g.validate();
    return g;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

} // namespace dirac::io
