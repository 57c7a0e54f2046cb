#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "dirac/errors.hpp"
#include "dirac/thermo.hpp"

namespace dirac::thermo {

void ReactionNetwork::validate() const {
    if (input.size() != output.size())
        throw DimensionError("reaction network has " + std::to_string(input.size()) + " input and " +
                             std::to_string(output.size()) + " output coefficient lists");
    for (std::size_t r = 0; r < input.size(); ++r) {
        if (input[r].size() != species.size() || output[r].size() != species.size())
            throw DimensionError("reaction " + std::to_string(r) + " does not list one coefficient per species");
        for (std::size_t s = 0; s < species.size(); ++s)
            if (input[r][s] < 0 || output[r][s] < 0)
                throw DomainError("reaction " + std::to_string(r) + " has a negative coefficient for " + species[s]);
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '(' || c == ')' || c == '[' || c == ']';
}

struct Term {
    long coeff;
    std::string name;
};

std::vector<Term> parse_side(std::string_view side, std::size_t line) {
    std::vector<Term> terms;
    side = trim(side);
    if (side.empty() || side == "0") return terms;
    auto fail = [line](const std::string& what) {
        throw ParseError("reactions line " + std::to_string(line) + ": " + what);
    };
    std::size_t start = 0;
    for (;;) {
        const std::size_t plus = side.find('+', start);
        std::string_view term = trim(side.substr(start, plus == std::string_view::npos ? std::string_view::npos : plus - start));
        if (term.empty()) fail("empty term");
        std::size_t i = 0;
        long coeff = 1;
        if (std::isdigit(static_cast<unsigned char>(term[0]))) {
            coeff = 0;
            while (i < term.size() && std::isdigit(static_cast<unsigned char>(term[i]))) {
                coeff = coeff * 10 + (term[i] - '0');
                if (coeff > 1000000000L) fail("coefficient too large");
                ++i;
            }
            while (i < term.size() && std::isspace(static_cast<unsigned char>(term[i]))) ++i;
        }
        const std::string_view name = term.substr(i);
        if (name.empty()) fail("missing species after coefficient");
        if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_' && name[0] != '(' && name[0] != '[')
            fail("species name '" + std::string(name) + "' must start with a letter");
        for (char c : name)
            if (!name_char(c)) fail("unexpected character '" + std::string(1, c) + "' in species '" + std::string(name) + "'");
        terms.push_back({coeff, std::string(name)});
        if (plus == std::string_view::npos) break;
        start = plus + 1;
    }
    return terms;
}

} // namespace

ReactionNetwork parse_reactions(std::string_view text) {
    ReactionNetwork net;
    std::vector<std::pair<std::vector<Term>, std::vector<Term>>> parsed;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t arrow = line.find("->");
        if (arrow == std::string_view::npos)
            throw ParseError("reactions line " + std::to_string(line_no) + ": expected '->'");
        if (line.find("->", arrow + 2) != std::string_view::npos)
            throw ParseError("reactions line " + std::to_string(line_no) + ": more than one '->'");
        auto lhs = parse_side(line.substr(0, arrow), line_no);
        auto rhs = parse_side(line.substr(arrow + 2), line_no);
        for (const auto* side : {&lhs, &rhs})
            for (const auto& t : *side)
                if (std::find(net.species.begin(), net.species.end(), t.name) == net.species.end())
                    net.species.push_back(t.name);
        parsed.emplace_back(std::move(lhs), std::move(rhs));
    }
    auto index = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(net.species.begin(), net.species.end(), name) - net.species.begin());
    };
    for (const auto& [lhs, rhs] : parsed) {
        std::vector<long> in(net.species.size(), 0), out(net.species.size(), 0);
        for (const auto& t : lhs) in[index(t.name)] += t.coeff;
        for (const auto& t : rhs) out[index(t.name)] += t.coeff;
        net.input.push_back(std::move(in));
        net.output.push_back(std::move(out));
    }
    return net;
}

std::string format_reactions(const ReactionNetwork& net) {
    net.validate();
    auto side = [&](const std::vector<long>& coeffs) {
        std::string s;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            if (coeffs[i] == 0) continue;
            if (!s.empty()) s += " + ";
            if (coeffs[i] != 1) s += std::to_string(coeffs[i]) + " ";
            s += net.species[i];
        }
        return s.empty() ? std::string("0") : s;
    };
    std::string out;
    for (std::size_t r = 0; r < net.reactions(); ++r) out += side(net.input[r]) + " -> " + side(net.output[r]) + "\n";
    return out;
}

Stoichiometry stoichiometry(const ReactionNetwork& net) {
    net.validate();
    const std::size_t ns = net.species.size(), nr = net.reactions();
    Stoichiometry st;
    st.nu = lin::Mat(ns, nr);
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t s = 0; s < ns; ++s) st.nu(s, r) = lin::Rat(net.output[r][s] - net.input[r][s]);
    st.subspace = lin::Subspace::span(ns, st.nu.transpose());
    st.conserved = lin::rref(lin::null_space(st.nu.transpose())).reduced;
    if (st.conserved.cols() != ns) st.conserved = lin::Mat(0, ns);
    return st;
}

lin::Vec Stoichiometry::project(std::span<const lin::Rat> n) const {
    if (n.size() != conserved.cols())
        throw DimensionError("project: expected " + std::to_string(conserved.cols()) + " species amounts, got " +
                             std::to_string(n.size()));
    return lin::mat_vec(conserved, n);
}

VectorXd Stoichiometry::project(const VectorXd& n) const {
    if (static_cast<std::size_t>(n.size()) != conserved.cols())
        throw DimensionError("project: expected " + std::to_string(conserved.cols()) + " species amounts, got " +
                             std::to_string(n.size()));
    MatrixXd L(static_cast<Eigen::Index>(conserved.rows()), n.size());
    for (std::size_t i = 0; i < conserved.rows(); ++i)
        for (std::size_t j = 0; j < conserved.cols(); ++j)
            L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = conserved(i, j).get_d();
    return L * n;
}

GibbsResult gibbs_equilibrium(const ThermoSystem& sys, double T, double p, const ReactionNetwork& net,
                              const VectorXd& N0) {
    const std::size_t k = net.species.size();
    if (sys.domain.dim() != 2 + k)
        throw DimensionError("gibbs: system has " + std::to_string(sys.domain.dim()) + " coordinates, expected (U, V) plus " +
                             std::to_string(k) + " species");
    if (static_cast<std::size_t>(N0.size()) != k)
        throw DimensionError("gibbs: initial amounts have " + std::to_string(N0.size()) + " entries for " +
                             std::to_string(k) + " species");
    if (k > 0 && !(N0.minCoeff() > 0)) throw DomainError("gibbs: initial amounts must be positive");
    const Stoichiometry st = stoichiometry(net);
    const auto kk = static_cast<Eigen::Index>(k);
    const auto nc = static_cast<Eigen::Index>(st.conserved.rows());
    // x = (U, V, N…, U′, V′): U + U′ = 0, V + V′ = 0, L N = L N0.
    const ThermoSystem all = thermo_tensor_all({sys, heat_bath(T), pressure_bath(p, T)});
    MatrixXd A = MatrixXd::Zero(2 + nc, 4 + kk);
    VectorXd b = VectorXd::Zero(2 + nc);
    A(0, 0) = 1;
    A(0, 2 + kk) = 1;
    A(1, 1) = 1;
    A(1, 3 + kk) = 1;
    const VectorXd y = st.project(N0);
    for (Eigen::Index i = 0; i < nc; ++i)
        for (Eigen::Index j = 0; j < kk; ++j)
            A(2 + i, 2 + j) = st.conserved(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).get_d();
    b.tail(nc) = y;
    const Equilibrium e = maximize_concave(all, A, b);
    if (!e.feasible || !std::isfinite(e.value)) throw SolverError("gibbs: no feasible composition");
    GibbsResult out;
    out.U = e.argmax(0);
    out.V = e.argmax(1);
    out.N = e.argmax.segment(2, kk);
    out.Xi = e.value;
    out.kkt_residual = e.kkt_residual;
    out.boundary = e.boundary;
    return out;
}

} // namespace dirac::thermo
