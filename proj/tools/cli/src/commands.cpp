#include "dirac_cli/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "dirac/errors.hpp"
#include "dirac/io.hpp"
#include "dirac_cli/documents.hpp"

namespace dirac::cli {

namespace {

struct Options {
    std::string input;
    std::string output;
    double t0 = 0;
    double t1 = 1;
    double dt = 1e-3;
    std::string scheme = "rk4";
    std::string at;
    double tol = 1e-8;
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_document(const std::string& path) {
    std::stringstream text;
    if (path == "-") {
        text << std::cin.rdbuf();
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw UsageError("cannot read '" + path + "'");
        text << in.rdbuf();
    }
    try {
        return json::parse(text.str());
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_text(const Options& opt, std::ostream& out, const std::string& text) {
    if (opt.output.empty() || opt.output == "-") {
        out << text;
        return;
    }
    std::ofstream file(opt.output, std::ios::binary);
    if (!file) throw UsageError("cannot write '" + opt.output + "'");
    file << text;
    if (!file) throw UsageError("failed writing '" + opt.output + "'");
}

std::uint64_t seed_from_env() {
    const char* s = std::getenv("DIRAC_COMPOSE_SEED");
    if (!s || !*s) return 20240611;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (*end != '\0') throw UsageError("DIRAC_COMPOSE_SEED must be a non-negative integer");
    return v;
}

Eigen::VectorXd parse_point(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw UsageError("--at: '" + item + "' is not a number");
        }
        if (used != item.size()) throw UsageError("--at: '" + item + "' is not a number");
        values.push_back(v);
    }
    return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json kernel_json(const ph::KernelRep& k) {
    return {{"F", matrix_json(k.F)}, {"E", matrix_json(k.E)}, {"G", matrix_json(k.G)}};
}

json equilibrium_json(const thermo::Equilibrium& eq) {
    return {{"feasible", eq.feasible},
            {"value", number(eq.value)},
            {"argmax", vector_json(eq.argmax)},
            {"multipliers", vector_json(eq.multipliers)},
            {"boundary", eq.boundary},
            {"kkt_residual", number(eq.kkt_residual)}};
}

thermo::Pushforward thermo_pushforward(const ThermoDiagram& d) {
    return thermo::Pushforward(d.relation, d.systems, d.outer);
}

// compose

json compose_document(const json& doc) {
    const json& src = source_of(doc);
    switch (doc_kind(src)) {
    case DocKind::dirac: {
        const auto d = compile_dirac(src);
        return {{"kind", "dirac-relation"}, {"source", src}, {"relation", io::to_json(d.relation)}};
    }
    case DocKind::ph: {
        const auto d = compile_ph(src);
        json boundary = json::array();
        for (const auto& p : d.outer) boundary.push_back({{"bond", p.bond}, {"dir", p.out ? "out" : "in"}});
        json kernels = json::array();
        for (const auto& x : d.samples)
            kernels.push_back({{"x", vector_json(x)}, {"kernel", kernel_json(ph::reduced_kernel(d.system.D(x)))}});
        return {{"kind", "ph-system"},
                {"source", src},
                {"name", d.system.name},
                {"state_dim", d.system.state_dim},
                {"boundary", boundary},
                {"relation", io::to_json(d.relation)},
                {"kernels", kernels}};
    }
    case DocKind::thermo: {
        const auto d = compile_thermo(src);
        const auto push = thermo_pushforward(d);
        json values = json::array();
        for (const auto& y : d.queries) {
            const auto eq = push.solve(y);
            values.push_back({{"y", vector_json(y)},
                              {"value", number(eq.value)},
                              {"argmax", vector_json(eq.argmax)},
                              {"boundary", eq.boundary}});
        }
        return {{"kind", "thermo-system"},
                {"source", src},
                {"systems", d.names},
                {"A", matrix_json(d.relation.A)},
                {"B", matrix_json(d.relation.B)},
                {"c", vector_json(d.relation.c)},
                {"x_domain", domain_json(push.product().domain)},
                {"outer", domain_json(d.outer)},
                {"values", values}};
    }
    case DocKind::uwd: {
        const auto d = compile_uwd(src);
        json out = {{"kind", "uwd-operation"}, {"source", src}, {"operation", io::to_json(d.operation)}};
        if (!d.graphs.empty()) {
            if (d.graphs.size() != d.operation.arity())
                throw DimensionError("the operation has " + std::to_string(d.operation.arity()) + " boxes but " +
                                     std::to_string(d.graphs.size()) + " graphs are given");
            out["graph"] = io::to_json(operad::open_graph_act(d.operation, d.graphs));
        }
        return out;
    }
    }
    throw ParseError("unsupported document");
}

int cmd_compose(const Options& opt, std::ostream& out) {
    write_text(opt, out, io::dump(compose_document(read_document(opt.input))));
    return exit_ok;
}

// simulate

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
    const json doc = read_document(opt.input);
    const json& src = source_of(doc);
    if (doc_kind(src) != DocKind::ph) throw UsageError("simulate needs a port-Hamiltonian document");
    if (!(opt.dt > 0) || !(opt.t1 >= opt.t0)) throw UsageError("need dt > 0 and t1 >= t0");
    ph::Scheme scheme;
    if (opt.scheme == "rk4") scheme = ph::Scheme::rk4;
    else if (opt.scheme == "midpoint") scheme = ph::Scheme::midpoint;
    else throw UsageError("--scheme must be rk4 or midpoint");
    const auto d = compile_ph(src);
    const auto traj = ph::simulate(d.system, d.inputs, d.x0, opt.t0, opt.t1, opt.dt, scheme);
    write_text(opt, out, ph::trajectory_csv(d.system, traj));
    const std::string audit = "energy_audit=" + io::format_double(ph::energy_audit(d.system, traj)) +
                              " compatibility=" + io::format_double(traj.max_compatibility_residual) + "\n";
    (opt.output.empty() || opt.output == "-" ? err : out) << audit;
    return exit_ok;
}

// equilibrate

json gibbs_json(const ThermoDiagram& d) {
    const auto it = std::find(d.names.begin(), d.names.end(), d.gibbs_system);
    const auto& sys = d.systems[static_cast<std::size_t>(it - d.names.begin())];
    const auto r = thermo::gibbs_equilibrium(sys, d.T, d.p, d.network, d.N0);
    const auto st = thermo::stoichiometry(d.network);
    return {{"species", d.network.species},
            {"nu", io::to_json(st.nu)},
            {"N", vector_json(r.N)},
            {"U", number(r.U)},
            {"V", number(r.V)},
            {"Xi", number(r.Xi)},
            {"boundary", r.boundary},
            {"kkt_residual", number(r.kkt_residual)}};
}

int cmd_equilibrate(const Options& opt, std::ostream& out) {
    const json doc = read_document(opt.input);
    const json& src = source_of(doc);
    if (doc_kind(src) != DocKind::thermo) throw UsageError("equilibrate needs a thermostatic document");
    const auto d = compile_thermo(src);
    if (d.has_gibbs && opt.at.empty()) {
        write_text(opt, out, io::dump(gibbs_json(d)));
        return exit_ok;
    }
    const Eigen::VectorXd y = parse_point(opt.at);
    if (static_cast<std::size_t>(y.size()) != d.outer.dim())
        throw DimensionError("--at has " + std::to_string(y.size()) + " coordinates but the outer domain has " +
                             std::to_string(d.outer.dim()));
    write_text(opt, out, io::dump(equilibrium_json(thermo_pushforward(d).solve(y))));
    return exit_ok;
}

// check

struct Report {
    std::ostream& out;
    bool failed = false;
    bool dirac_failed = false;

    void line(bool ok, const std::string& name, const std::string& detail, bool dirac = false) {
        out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
        if (!ok) {
            failed = true;
            dirac_failed = dirac_failed || dirac;
        }
    }
};

void check_raw_relation(const json& j, Report& report) {
    const BondSpace dom = io::bond_from_json(j.at("dom"));
    const BondSpace cod = io::bond_from_json(j.at("cod"));
    const BondSpace total = bond::direct_sum(dom.dual(), cod);
    lin::Mat basis = io::mat_from_json(j.at("basis"));
    if (basis.rows() == 0) basis = lin::Mat(0, total.dim());
    if (basis.cols() != total.dim())
        throw DimensionError("relation basis has " + std::to_string(basis.cols()) + " columns, expected " +
                             std::to_string(total.dim()));
    const auto sub = lin::Subspace::span(total.dim(), basis);
    lin::Rat worst = 0;
    for (std::size_t a = 0; a < sub.rank(); ++a)
        for (std::size_t b = a; b < sub.rank(); ++b) {
            lin::Rat v = abs(bond::pairing(total, sub.basis().row(a), sub.basis().row(b)));
            if (v > worst) worst = v;
        }
    const auto c = bond::classify(total, sub);
    report.line(c.isotropic, "isotropy", "max |<u, v>+| over the basis = " + lin::to_string(worst), true);
    report.line(sub.rank() == total.half_dim(), "half-dimension",
                "rank " + std::to_string(sub.rank()) + ", half dimension " + std::to_string(total.half_dim()), true);
    report.line(c.dirac, "dirac", c.dirac ? "U = U°" : "U differs from its polar", true);
}

void check_ph(const PHDiagram& d, const Options& opt, std::uint64_t seed, Report& report) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Eigen::VectorXd> states = d.samples;
    for (int k = 0; k < 200 && states.size() < d.samples.size() + 20; ++k) {
        Eigen::VectorXd x = d.x0;
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += normal(rng);
        if (d.system.in_domain(x)) states.push_back(x);
    }
    double worst = 0;
    std::string failure;
    for (const auto& x : states) {
        const auto k = d.system.D(x);
        worst = std::max(worst, ph::isotropy_residual(k, d.system.boundary));
        try {
            ph::check_kernel(k, d.system.state_dim, d.system.boundary, opt.tol);
        } catch (const DiracCheckError& e) {
            if (failure.empty()) failure = e.what();
        }
    }
    report.line(failure.empty(), "dirac-kernel",
                std::to_string(states.size()) + " states, max isotropy residual " + io::format_double(worst) +
                    (failure.empty() ? "" : "; " + failure),
                true);
    const double g = ph::gradient_check(d.system, states);
    report.line(g <= 1e-5, "hamiltonian-gradient", "max relative gap " + io::format_double(g));
}

void check_thermo(const ThermoDiagram& d, const Options& opt, std::uint64_t seed, Report& report) {
    for (std::size_t i = 0; i < d.systems.size(); ++i) {
        const double v = thermo::concavity_violation(d.systems[i], 200, seed + i);
        report.line(v <= opt.tol, "concavity " + d.names[i], "max midpoint violation " + io::format_double(v));
    }
    if (d.outer.dim() > 0) {
        const auto composite = thermo_pushforward(d).system("composite");
        const double v = thermo::concavity_violation(composite, 20, seed + d.systems.size());
        report.line(v <= 1e-6, "concavity composite", "max midpoint violation " + io::format_double(v));
    }
}

operad::UwdOperation random_uwd(std::mt19937_64& rng, std::size_t boxes, std::size_t outer) {
    std::uniform_int_distribution<std::size_t> ports(0, 3);
    std::vector<std::size_t> inner(boxes);
    for (auto& p : inner) p = ports(rng);
    std::size_t total = 0;
    for (auto p : inner) total += p;
    const std::size_t apex = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    std::uniform_int_distribution<std::size_t> junction(0, apex - 1);
    std::vector<std::size_t> left(total), right(outer);
    for (auto& j : left) j = junction(rng);
    for (auto& j : right) j = junction(rng);
    return operad::UwdOperation(inner, outer, operad::FinCospan(left, right, apex));
}

operad::OpenGraph random_graph(std::mt19937_64& rng, std::size_t ports) {
    operad::OpenGraph g;
    g.vertices = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    std::uniform_int_distribution<std::size_t> vertex(0, g.vertices - 1);
    const std::size_t edges = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
    for (std::size_t e = 0; e < edges; ++e) {
        g.src.push_back(vertex(rng));
        g.tgt.push_back(vertex(rng));
    }
    for (std::size_t p = 0; p < ports; ++p) g.iface.push_back(vertex(rng));
    return g;
}

void check_uwd(const UwdDiagram& d, std::uint64_t seed, Report& report) {
    const auto& f = d.operation;
    std::mt19937_64 rng(seed);
    bool unit = operad::uwd_substitute(operad::UwdOperation::identity(f.outer()), 0, f) == f;
    for (std::size_t i = 0; i < f.arity(); ++i)
        unit = unit && operad::uwd_substitute(f, i, operad::UwdOperation::identity(f.inner()[i])) == f;
    report.line(unit, "unit", "identity substitution on every box and on the outside");

    std::size_t trials = 0, bad_assoc = 0, bad_algebra = 0;
    std::uniform_int_distribution<std::size_t> arity(0, 3);
    for (std::size_t i = 0; i < f.arity(); ++i)
        for (int t = 0; t < 20; ++t) {
            const auto g = random_uwd(rng, 1 + arity(rng), f.inner()[i]);
            const std::size_t j = std::uniform_int_distribution<std::size_t>(0, g.arity() - 1)(rng);
            const auto h = random_uwd(rng, arity(rng), g.inner()[j]);
            const auto lhs = operad::uwd_substitute(operad::uwd_substitute(f, i, g), i + j, h);
            const auto rhs = operad::uwd_substitute(f, i, operad::uwd_substitute(g, j, h));
            ++trials;
            if (!(lhs == rhs)) ++bad_assoc;

            std::vector<operad::OpenGraph> outer_args, inner_args;
            for (std::size_t b = 0; b < f.arity(); ++b)
                if (b != i) outer_args.push_back(random_graph(rng, f.inner()[b]));
            for (std::size_t b = 0; b < g.arity(); ++b) inner_args.push_back(random_graph(rng, g.inner()[b]));
            std::vector<operad::OpenGraph> glued = outer_args, flat = outer_args;
            glued.insert(glued.begin() + static_cast<std::ptrdiff_t>(i), operad::open_graph_act(g, inner_args));
            flat.insert(flat.begin() + static_cast<std::ptrdiff_t>(i), inner_args.begin(), inner_args.end());
            const auto a = operad::open_graph_act(f, glued);
            const auto b = operad::open_graph_act(operad::uwd_substitute(f, i, g), flat);
            if (!operad::isomorphic(a, b)) ++bad_algebra;
        }
    report.line(bad_assoc == 0, "associativity",
                std::to_string(trials - bad_assoc) + "/" + std::to_string(trials) + " random nested substitutions");
    report.line(bad_algebra == 0, "open-graph substitution",
                std::to_string(trials - bad_algebra) + "/" + std::to_string(trials) + " random gluings");
}

int cmd_check(const Options& opt, std::ostream& out) {
    const json doc = read_document(opt.input);
    const std::uint64_t seed = seed_from_env();
    Report report{out};
    const bool raw = doc.is_object() && !doc.contains("kind") && doc.contains("basis");
    if (raw) {
        check_raw_relation(doc, report);
    } else if (doc.is_object() && doc.value("kind", "") == "dirac-relation") {
        check_raw_relation(doc.at("relation"), report);
    } else {
        const json& src = source_of(doc);
        switch (doc_kind(src)) {
        case DocKind::dirac: check_raw_relation(io::to_json(compile_dirac(src).relation), report); break;
        case DocKind::ph: check_ph(compile_ph(src), opt, seed, report); break;
        case DocKind::thermo: check_thermo(compile_thermo(src), opt, seed, report); break;
        case DocKind::uwd: check_uwd(compile_uwd(src), seed, report); break;
        }
    }
    if (report.dirac_failed) return exit_dirac;
    return report.failed ? exit_solver : exit_ok;
}

} // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compose, simulate and equilibrate physical systems described as diagram documents",
                 "dirac-compose"};
    app.require_subcommand(1);
    Options opt;

    auto add_io = [&](CLI::App* sub) {
        sub->add_option("--input,-i", opt.input, "document to read ('-' for stdin)")->required();
        sub->add_option("--output,-o", opt.output, "file to write instead of stdout");
    };
    auto* compose = app.add_subcommand("compose", "resolve a diagram and write the composite as JSON");
    add_io(compose);
    auto* simulate = app.add_subcommand("simulate", "integrate a port-Hamiltonian document and write CSV");
    add_io(simulate);
    simulate->add_option("--t0", opt.t0, "start time");
    simulate->add_option("--t1", opt.t1, "end time");
    simulate->add_option("--dt", opt.dt, "step size");
    simulate->add_option("--scheme", opt.scheme, "rk4 or midpoint");
    auto* equilibrate = app.add_subcommand("equilibrate", "maximize total entropy of a thermostatic document");
    add_io(equilibrate);
    equilibrate->add_option("--at", opt.at, "outer point, comma separated");
    auto* check = app.add_subcommand("check", "run invariant checks and print PASS/FAIL per invariant");
    add_io(check);
    check->add_option("--tol", opt.tol, "tolerance for floating-point checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*compose) return cmd_compose(opt, out);
        if (*simulate) return cmd_simulate(opt, out, err);
        if (*equilibrate) return cmd_equilibrate(opt, out);
        return cmd_check(opt, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const DimensionError& e) {
        err << "dimension error: " << e.what() << '\n';
        return exit_dimension;
    } catch (const DiracCheckError& e) {
        err << "dirac check failed: " << e.what() << '\n';
        return exit_dirac;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return exit_solver;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_parse;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_parse;
    }
}

} // namespace dirac::cli
