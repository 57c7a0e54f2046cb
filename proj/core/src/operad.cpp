#include "dirac/operad.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>
#include <utility>

#include "dirac/errors.hpp"

namespace dirac::operad {

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

    /// Dense class index per element, numbered by smallest member.
    std::vector<std::size_t> classes(std::size_t& count) {
        std::vector<std::size_t> id(parent_.size(), SIZE_MAX), out(parent_.size());
        count = 0;
        for (std::size_t i = 0; i < parent_.size(); ++i) {
            const std::size_t r = find(i);
            if (id[r] == SIZE_MAX) id[r] = count++;
            out[i] = id[r];
        }
        return out;
    }

private:
    std::vector<std::size_t> parent_;
};

void check_range(const std::vector<std::size_t>& map, std::size_t bound, const char* what) {
    for (auto x : map)
        if (x >= bound)
            throw DimensionError(std::string(what) + ": index " + std::to_string(x) + " out of range " +
                                 std::to_string(bound));
}

} // namespace

// ---------------------------------------------------------------------------
// Cospans

FinCospan::FinCospan(std::vector<std::size_t> left, std::vector<std::size_t> right, std::size_t apex) : apex_(apex) {
    check_range(left, apex, "cospan left leg");
    check_range(right, apex, "cospan right leg");
    std::vector<std::size_t> relabel(apex, SIZE_MAX);
    std::size_t next = 0;
    auto visit = [&](std::vector<std::size_t>& leg) {
        for (auto& x : leg) {
            if (relabel[x] == SIZE_MAX) relabel[x] = next++;
            x = relabel[x];
        }
    };
    visit(left);
    visit(right);
    left_ = std::move(left);
    right_ = std::move(right);
}

FinCospan FinCospan::identity(std::size_t n) {
    std::vector<std::size_t> id(n);
    std::iota(id.begin(), id.end(), 0);
    return FinCospan(id, id, n);
}

FinCospan cospan_compose(const FinCospan& f, const FinCospan& g) {
    if (f.right().size() != g.left().size())
        throw DimensionError("cospan compose: middle sets have sizes " + std::to_string(f.right().size()) + " and " +
                             std::to_string(g.left().size()));
    const std::size_t x = f.apex();
    UnionFind uf(x + g.apex());
    for (std::size_t i = 0; i < f.right().size(); ++i) uf.unite(f.right()[i], x + g.left()[i]);
    std::size_t count = 0;
    const auto cls = uf.classes(count);
    std::vector<std::size_t> left, right;
    for (auto a : f.left()) left.push_back(cls[a]);
    for (auto c : g.right()) right.push_back(cls[x + c]);
    return FinCospan(std::move(left), std::move(right), count);
}

FinCospan cospan_sum(const FinCospan& f, const FinCospan& g) {
    std::vector<std::size_t> left = f.left(), right = f.right();
    for (auto a : g.left()) left.push_back(f.apex() + a);
    for (auto c : g.right()) right.push_back(f.apex() + c);
    return FinCospan(std::move(left), std::move(right), f.apex() + g.apex());
}

// ---------------------------------------------------------------------------
// Wiring diagrams

UwdOperation::UwdOperation(std::vector<std::size_t> inner, std::size_t outer, FinCospan wiring)
    : inner_(std::move(inner)), outer_(outer), wiring_(std::move(wiring)) {
    if (wiring_.left().size() != inner_ports())
        throw DimensionError("wiring diagram: wiring has " + std::to_string(wiring_.left().size()) +
                             " inner ports but boxes have " + std::to_string(inner_ports()));
    if (wiring_.right().size() != outer_)
        throw DimensionError("wiring diagram: wiring has " + std::to_string(wiring_.right().size()) +
                             " outer ports, expected " + std::to_string(outer_));
}

UwdOperation UwdOperation::identity(std::size_t ports) { return {{ports}, ports, FinCospan::identity(ports)}; }

std::size_t UwdOperation::inner_ports() const { return std::accumulate(inner_.begin(), inner_.end(), std::size_t{0}); }

std::size_t UwdOperation::port_offset(std::size_t slot) const {
    return std::accumulate(inner_.begin(), inner_.begin() + static_cast<std::ptrdiff_t>(slot), std::size_t{0});
}

UwdOperation uwd_substitute(const UwdOperation& outer, std::size_t slot, const UwdOperation& inner) {
    if (slot >= outer.arity())
        throw DimensionError("substitute: slot " + std::to_string(slot) + " of " + std::to_string(outer.arity()));
    if (inner.outer() != outer.inner()[slot])
        throw DimensionError("substitute: inner diagram exposes " + std::to_string(inner.outer()) +
                             " ports, slot has " + std::to_string(outer.inner()[slot]));
    const std::size_t before = outer.port_offset(slot);
    const std::size_t after = outer.inner_ports() - before - outer.inner()[slot];
    const FinCospan padded =
        cospan_sum(cospan_sum(FinCospan::identity(before), inner.wiring()), FinCospan::identity(after));

    std::vector<std::size_t> boxes(outer.inner().begin(), outer.inner().begin() + static_cast<std::ptrdiff_t>(slot));
    boxes.insert(boxes.end(), inner.inner().begin(), inner.inner().end());
    boxes.insert(boxes.end(), outer.inner().begin() + static_cast<std::ptrdiff_t>(slot) + 1, outer.inner().end());
    return UwdOperation(std::move(boxes), outer.outer(), cospan_compose(padded, outer.wiring()));
}

UwdOperation uwd_compose(const UwdOperation& g, std::span<const UwdOperation> fs) {
    if (fs.size() != g.arity())
        throw DimensionError("compose: " + std::to_string(fs.size()) + " operations for arity " +
                             std::to_string(g.arity()));
    UwdOperation out = g;
    for (std::size_t i = fs.size(); i-- > 0;) out = uwd_substitute(out, i, fs[i]);
    return out;
}

UwdOperation uwd_permute(const UwdOperation& g, std::span<const std::size_t> sigma) {
    const std::size_t k = g.arity();
    if (sigma.size() != k) throw DimensionError("permute: permutation size differs from arity");
    std::vector<bool> seen(k, false);
    for (auto s : sigma) {
        if (s >= k || seen[s]) throw DimensionError("permute: not a permutation");
        seen[s] = true;
    }
    std::vector<std::size_t> boxes, left;
    for (std::size_t b = 0; b < k; ++b) {
        const std::size_t old = sigma[b];
        boxes.push_back(g.inner()[old]);
        const std::size_t off = g.port_offset(old);
        for (std::size_t p = 0; p < g.inner()[old]; ++p) left.push_back(g.wiring().left()[off + p]);
    }
    return UwdOperation(std::move(boxes), g.outer(), FinCospan(std::move(left), g.wiring().right(), g.wiring().apex()));
}

// ---------------------------------------------------------------------------
// Open graphs

void OpenGraph::validate() const {
    if (src.size() != tgt.size()) throw DimensionError("open graph: source and target lists differ in length");
    check_range(src, vertices, "open graph source");
    check_range(tgt, vertices, "open graph target");
    check_range(iface, vertices, "open graph interface");
}

namespace {

using Colors = std::vector<std::size_t>;

std::size_t count_cells(const Colors& c) {
    Colors s = c;
    std::sort(s.begin(), s.end());
    return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

// Colour refinement by sorted in/out neighbour colours. Colour ranks respect the
// previous ordering, so the result depends only on the isomorphism class.
Colors refine(const OpenGraph& g, Colors colors) {
    const std::size_t n = g.vertices;
    std::size_t cells = count_cells(colors);
    while (true) {
        using Sig = std::tuple<std::size_t, std::vector<std::size_t>, std::vector<std::size_t>>;
        std::vector<Sig> sig(n);
        for (std::size_t v = 0; v < n; ++v) std::get<0>(sig[v]) = colors[v];
        for (std::size_t e = 0; e < g.edges(); ++e) {
            std::get<1>(sig[g.src[e]]).push_back(colors[g.tgt[e]]);
            std::get<2>(sig[g.tgt[e]]).push_back(colors[g.src[e]]);
        }
        for (auto& s : sig) {
            std::sort(std::get<1>(s).begin(), std::get<1>(s).end());
            std::sort(std::get<2>(s).begin(), std::get<2>(s).end());
        }
        std::vector<Sig> distinct = sig;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (std::size_t v = 0; v < n; ++v)
            colors[v] = static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), sig[v]) -
                                                 distinct.begin());
        if (distinct.size() == cells) return colors;
        cells = distinct.size();
    }
}

OpenGraph relabel(const OpenGraph& g, const Colors& label) {
    OpenGraph out;
    out.vertices = g.vertices;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t e = 0; e < g.edges(); ++e) edges.emplace_back(label[g.src[e]], label[g.tgt[e]]);
    std::sort(edges.begin(), edges.end());
    for (auto [s, t] : edges) {
        out.src.push_back(s);
        out.tgt.push_back(t);
    }
    for (auto v : g.iface) out.iface.push_back(label[v]);
    return out;
}

bool less_than(const OpenGraph& a, const OpenGraph& b) {
    return std::tie(a.iface, a.src, a.tgt) < std::tie(b.iface, b.src, b.tgt);
}

void search(const OpenGraph& g, const Colors& colors, const std::vector<bool>& isolated, OpenGraph& best,
            bool& have_best) {
    const std::size_t n = g.vertices;
    if (count_cells(colors) == n) {
        OpenGraph candidate = relabel(g, colors);
        if (!have_best || less_than(candidate, best)) {
            best = std::move(candidate);
            have_best = true;
        }
        return;
    }
    // First non-singleton cell in colour order.
    std::vector<std::size_t> size(n, 0);
    for (auto c : colors) ++size[c];
    std::size_t target = 0;
    while (size[target] < 2) ++target;
    bool all_isolated = true;
    for (std::size_t v = 0; v < n; ++v)
        if (colors[v] == target && !isolated[v]) all_isolated = false;
    for (std::size_t v = 0; v < n; ++v) {
        if (colors[v] != target) continue;
        Colors next(n);
        for (std::size_t u = 0; u < n; ++u) next[u] = 2 * colors[u] + (u == v ? 0 : 1);
        search(g, refine(g, next), isolated, best, have_best);
        // Isolated vertices in one cell are interchangeable: one branch suffices.
        if (all_isolated) break;
    }
}

} // namespace

OpenGraph canonical_form(const OpenGraph& g) {
    g.validate();
    const std::size_t n = g.vertices;
    if (n == 0) return g;
    // Initial colour: the sorted interface positions landing on the vertex.
    std::vector<std::vector<std::size_t>> ports(n);
    for (std::size_t p = 0; p < g.iface.size(); ++p) ports[g.iface[p]].push_back(p);
    auto distinct = ports;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    Colors colors(n);
    for (std::size_t v = 0; v < n; ++v)
        colors[v] =
            static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), ports[v]) - distinct.begin());
    std::vector<bool> isolated(n, true);
    for (std::size_t e = 0; e < g.edges(); ++e) isolated[g.src[e]] = isolated[g.tgt[e]] = false;

    OpenGraph best;
    bool have_best = false;
    search(g, refine(g, colors), isolated, best, have_best);
    return best;
}

OpenGraph open_graph_act(const UwdOperation& op, std::span<const OpenGraph> graphs) {
    if (graphs.size() != op.arity())
        throw DimensionError("open graph action: " + std::to_string(graphs.size()) + " graphs for arity " +
                             std::to_string(op.arity()));
    std::vector<std::size_t> offset;
    std::size_t total = 0;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        graphs[i].validate();
        if (graphs[i].iface.size() != op.inner()[i])
            throw DimensionError("open graph action: graph " + std::to_string(i) + " exposes " +
                                 std::to_string(graphs[i].iface.size()) + " ports, box has " +
                                 std::to_string(op.inner()[i]));
        offset.push_back(total);
        total += graphs[i].vertices;
    }
    const std::size_t apex = op.wiring().apex();
    UnionFind uf(total + apex);
    std::size_t port = 0;
    for (std::size_t i = 0; i < graphs.size(); ++i)
        for (auto v : graphs[i].iface) uf.unite(offset[i] + v, total + op.wiring().left()[port++]);
    std::size_t count = 0;
    const auto cls = uf.classes(count);

    OpenGraph out;
    out.vertices = count;
    for (std::size_t i = 0; i < graphs.size(); ++i)
        for (std::size_t e = 0; e < graphs[i].edges(); ++e) {
            out.src.push_back(cls[offset[i] + graphs[i].src[e]]);
            out.tgt.push_back(cls[offset[i] + graphs[i].tgt[e]]);
        }
    for (auto j : op.wiring().right()) out.iface.push_back(cls[total + j]);
    return canonical_form(out);
}

// ---------------------------------------------------------------------------
// Op(DiracRel)

BondSpace interface_space(std::span<const PortType> ports) {
    BondSpace out;
    for (const auto& p : ports) out = bond::direct_sum(out, BondSpace::standard(p.dim, p.dual));
    return out;
}

namespace {

BondSpace sum_of(std::span<const BondSpace> spaces) {
    BondSpace out;
    for (const auto& s : spaces) out = bond::direct_sum(out, s);
    return out;
}

} // namespace

DiracOperation::DiracOperation(std::vector<BondSpace> inputs, BondSpace output, DiracRelation relation)
    : inputs_(std::move(inputs)), output_(std::move(output)), relation_(std::move(relation)) {
    if (!(relation_.dom() == sum_of(inputs_)) || !(relation_.cod() == output_))
        throw DimensionError("Dirac operation: relation does not match the declared input/output bond spaces");
}

DiracOperation DiracOperation::identity(const BondSpace& b) { return {{b}, b, DiracRelation::identity(b)}; }

DiracOperation dirac_substitute(const DiracOperation& outer, std::size_t slot, const DiracOperation& inner) {
    const auto& in = outer.inputs();
    if (slot >= in.size()) throw DimensionError("Dirac substitute: slot out of range");
    if (!(inner.output() == in[slot]))
        throw DimensionError("Dirac substitute: inner output does not match slot " + std::to_string(slot));
    DiracRelation pad = DiracRelation::identity(BondSpace());
    std::vector<BondSpace> inputs;
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (i == slot) {
            pad = direct_sum(pad, inner.relation());
            inputs.insert(inputs.end(), inner.inputs().begin(), inner.inputs().end());
        } else {
            pad = direct_sum(pad, DiracRelation::identity(in[i]));
            inputs.push_back(in[i]);
        }
    }
    return DiracOperation(std::move(inputs), outer.output(), compose(pad, outer.relation()));
}

DiracRelation dirac_algebra_act(const DiracOperation& op, std::span<const DiracRelation> args) {
    if (args.size() != op.inputs().size())
        throw DimensionError("Dirac action: " + std::to_string(args.size()) + " arguments for arity " +
                             std::to_string(op.inputs().size()));
    DiracRelation sum = DiracRelation::identity(BondSpace());
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!(args[i].cod() == op.inputs()[i]))
            throw DimensionError("Dirac action: argument " + std::to_string(i) + " has the wrong codomain");
        sum = direct_sum(sum, args[i]);
    }
    return compose(sum, op.relation());
}

DiracOperation wiring_operation(const UwdOperation& op, const std::vector<std::vector<PortType>>& box_ports,
                                const std::vector<PortType>& outer_ports) {
    if (box_ports.size() != op.arity()) throw DimensionError("wiring operation: port types for wrong number of boxes");
    for (std::size_t i = 0; i < op.arity(); ++i)
        if (box_ports[i].size() != op.inner()[i])
            throw DimensionError("wiring operation: box " + std::to_string(i) + " port types have wrong length");
    if (outer_ports.size() != op.outer()) throw DimensionError("wiring operation: outer port types have wrong length");

    // Every port in order (inner ports, then outer), with its junction, coordinate
    // offset and sign in the total space dual(dom) ⊕ cod.
    struct Port {
        std::size_t junction, offset, dim;
        int sign;
    };
    std::vector<Port> all;
    std::size_t coord = 0, p = 0;
    for (const auto& box : box_ports)
        for (const auto& t : box) {
            all.push_back({op.wiring().left()[p++], coord, t.dim, t.dual ? 1 : -1});
            coord += 2 * t.dim;
        }
    for (std::size_t q = 0; q < outer_ports.size(); ++q) {
        const auto& t = outer_ports[q];
        all.push_back({op.wiring().right()[q], coord, t.dim, t.dual ? -1 : 1});
        coord += 2 * t.dim;
    }

    lin::Mat constraints(0, coord);
    lin::Vec row(coord);
    for (std::size_t j = 0; j < op.wiring().apex(); ++j) {
        std::vector<const Port*> members;
        for (const auto& port : all)
            if (port.junction == j) members.push_back(&port);
        if (members.empty()) continue;
        const std::size_t d = members.front()->dim;
        for (auto* m : members)
            if (m->dim != d) throw DimensionError("wiring operation: junction " + std::to_string(j) + " joins ports of different dimensions");
        for (std::size_t c = 0; c < d; ++c) {
            for (std::size_t k = 1; k < members.size(); ++k) {
                std::fill(row.begin(), row.end(), Rat(0));
                row[members[0]->offset + c] = 1;
                row[members[k]->offset + c] = -1;
                constraints.append_row(row);
            }
            std::fill(row.begin(), row.end(), Rat(0));
            for (auto* m : members) row[m->offset + d + c] = m->sign;
            constraints.append_row(row);
        }
    }
    std::vector<BondSpace> inputs;
    for (const auto& box : box_ports) inputs.push_back(interface_space(box));
    BondSpace output = interface_space(outer_ports);
    DiracRelation rel(sum_of(inputs), output, lin::Subspace::kernel(coord, constraints));
    return DiracOperation(std::move(inputs), std::move(output), std::move(rel));
}

} // namespace dirac::operad
