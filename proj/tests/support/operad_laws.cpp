#include "operad_laws.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace testsupport {

using namespace dirac::operad;

namespace {

std::vector<std::size_t> random_ports(Rng& rng, std::size_t count) {
    std::vector<std::size_t> v(count);
    for (auto& k : v) k = rng.uniform_int(0, 3);
    return v;
}

// Flattened gluing of `args` into o ∘_slot p, computed by breadth-first search over
// the graph whose nodes are all vertices and all junctions of both diagrams.
OpenGraph nested_glue_oracle(const UwdOperation& o, std::size_t slot, const UwdOperation& p,
                             const std::vector<OpenGraph>& args) {
    std::size_t nodes = 0;
    std::vector<std::size_t> vert_off;
    for (const auto& g : args) {
        vert_off.push_back(nodes);
        nodes += g.vertices;
    }
    const std::size_t p_off = nodes;
    nodes += p.wiring().apex();
    const std::size_t o_off = nodes;
    nodes += o.wiring().apex();
    std::vector<std::vector<std::size_t>> adj(nodes);
    auto link = [&](std::size_t a, std::size_t b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    // Arguments slot..slot+|p|-1 belong to p; the rest map to o's remaining boxes.
    std::size_t p_port = 0;
    for (std::size_t a = 0; a < args.size(); ++a) {
        const bool in_p = a >= slot && a < slot + p.arity();
        std::size_t o_box = a < slot ? a : a - p.arity() + 1;
        for (std::size_t q = 0; q < args[a].iface.size(); ++q) {
            const std::size_t v = vert_off[a] + args[a].iface[q];
            if (in_p)
                link(v, p_off + p.wiring().left()[p_port++]);
            else
                link(v, o_off + o.wiring().left()[o.port_offset(o_box) + q]);
        }
    }
    for (std::size_t q = 0; q < p.outer(); ++q)
        link(p_off + p.wiring().right()[q], o_off + o.wiring().left()[o.port_offset(slot) + q]);

    std::vector<std::size_t> comp(nodes, SIZE_MAX);
    std::size_t count = 0;
    for (std::size_t s = 0; s < nodes; ++s) {
        if (comp[s] != SIZE_MAX) continue;
        std::queue<std::size_t> q;
        q.push(s);
        comp[s] = count;
        while (!q.empty()) {
            auto x = q.front();
            q.pop();
            for (auto y : adj[x])
                if (comp[y] == SIZE_MAX) {
                    comp[y] = count;
                    q.push(y);
                }
        }
        ++count;
    }
    OpenGraph out;
    out.vertices = count;
    for (std::size_t a = 0; a < args.size(); ++a)
        for (std::size_t e = 0; e < args[a].edges(); ++e) {
            out.src.push_back(comp[vert_off[a] + args[a].src[e]]);
            out.tgt.push_back(comp[vert_off[a] + args[a].tgt[e]]);
        }
    for (auto j : o.wiring().right()) out.iface.push_back(comp[o_off + j]);
    return canonical_form(out);
}

} // namespace

bool uwd_associativity_case(Rng& rng) {
    const std::size_t arity_h = rng.uniform_int(1, 3);
    const UwdOperation h = random_uwd(rng, arity_h, rng.uniform_int(0, 3));
    const std::size_t i = rng.uniform_int(0, static_cast<int>(arity_h) - 1);
    const std::size_t arity_f = rng.uniform_int(1, 3);
    const UwdOperation f = random_uwd(rng, random_ports(rng, arity_f), h.inner()[i]);
    const std::size_t j = rng.uniform_int(0, static_cast<int>(arity_f) - 1);
    const UwdOperation g = random_uwd(rng, rng.uniform_int(0, 3), f.inner()[j]);
    // Sequential: (h ∘ᵢ f) ∘_{i+j} g = h ∘ᵢ (f ∘ⱼ g).
    if (!(uwd_substitute(uwd_substitute(h, i, f), i + j, g) == uwd_substitute(h, i, uwd_substitute(f, j, g))))
        return false;
    // Parallel: slots i < k of h can be filled in either order.
    if (arity_h >= 2) {
        std::size_t a = rng.uniform_int(0, static_cast<int>(arity_h) - 2);
        std::size_t b = rng.uniform_int(static_cast<int>(a) + 1, static_cast<int>(arity_h) - 1);
        const UwdOperation fa = random_uwd(rng, rng.uniform_int(0, 3), h.inner()[a]);
        const UwdOperation fb = random_uwd(rng, rng.uniform_int(0, 3), h.inner()[b]);
        const auto lhs = uwd_substitute(uwd_substitute(h, a, fa), b + fa.arity() - 1, fb);
        const auto rhs = uwd_substitute(uwd_substitute(h, b, fb), a, fa);
        if (!(lhs == rhs)) return false;
    }
    return true;
}

bool uwd_unit_case(Rng& rng) {
    const UwdOperation op = random_uwd(rng, rng.uniform_int(0, 4), rng.uniform_int(0, 3));
    for (std::size_t i = 0; i < op.arity(); ++i)
        if (!(uwd_substitute(op, i, UwdOperation::identity(op.inner()[i])) == op)) return false;
    return uwd_substitute(UwdOperation::identity(op.outer()), 0, op) == op;
}

bool uwd_symmetry_case(Rng& rng) {
    const std::size_t n = rng.uniform_int(1, 4);
    const UwdOperation g = random_uwd(rng, n, rng.uniform_int(0, 3));
    std::vector<UwdOperation> fs;
    for (std::size_t i = 0; i < n; ++i) fs.push_back(random_uwd(rng, rng.uniform_int(0, 2), g.inner()[i]));
    std::vector<std::size_t> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    std::shuffle(sigma.begin(), sigma.end(), rng.engine());

    std::vector<UwdOperation> permuted;
    for (auto s : sigma) permuted.push_back(fs[s]);
    const auto lhs = uwd_compose(uwd_permute(g, sigma), permuted);

    std::vector<std::size_t> start(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) start[i + 1] = start[i] + fs[i].arity();
    std::vector<std::size_t> tau;
    for (auto s : sigma)
        for (std::size_t t = 0; t < fs[s].arity(); ++t) tau.push_back(start[s] + t);
    const auto rhs = uwd_permute(uwd_compose(g, fs), tau);
    return lhs == rhs;
}

bool open_graph_substitution_case(Rng& rng) {
    const std::size_t arity_o = rng.uniform_int(1, 3);
    const UwdOperation o = random_uwd(rng, arity_o, rng.uniform_int(0, 3));
    const std::size_t slot = rng.uniform_int(0, static_cast<int>(arity_o) - 1);
    const UwdOperation p = random_uwd(rng, rng.uniform_int(0, 3), o.inner()[slot]);
    const UwdOperation flat = uwd_substitute(o, slot, p);

    std::vector<OpenGraph> args;
    for (auto k : flat.inner()) args.push_back(random_open_graph(rng, k));
    const OpenGraph direct = open_graph_act(flat, args);

    std::vector<OpenGraph> inner_args(args.begin() + static_cast<std::ptrdiff_t>(slot),
                                      args.begin() + static_cast<std::ptrdiff_t>(slot + p.arity()));
    std::vector<OpenGraph> outer_args(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(slot));
    outer_args.push_back(open_graph_act(p, inner_args));
    outer_args.insert(outer_args.end(), args.begin() + static_cast<std::ptrdiff_t>(slot + p.arity()), args.end());
    const OpenGraph nested = open_graph_act(o, outer_args);

    return direct == nested && direct == nested_glue_oracle(o, slot, p, args);
}

} // namespace testsupport
