#pragma once

// Diagram documents: JSON descriptions of wired components, resolved into the
// library's objects. The format is described in docs/formats.md.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dirac/diracrel.hpp"
#include "dirac/operad.hpp"
#include "dirac/phsys.hpp"
#include "dirac/thermo.hpp"

namespace dirac::cli {

using nlohmann::json;

enum class DocKind { dirac, ph, thermo, uwd };

/// Reads "kind"; also accepts the outputs of `compose`, which carry their source document.
DocKind doc_kind(const json& doc);
/// The diagram document itself, unwrapping a compose output.
const json& source_of(const json& doc);

struct BondTable {
    std::vector<std::string> names;
    std::vector<std::size_t> dims;
    std::size_t index(const std::string& name, const std::string& owner) const;
};

struct DiracDiagram {
    BondTable bonds;
    DiracRelation relation = DiracRelation::identity(BondSpace());
};

struct PortSpec {
    std::string bond;
    bool out = false;  ///< power leaves the composite through this port
};

struct PHDiagram {
    BondTable bonds;
    DiracRelation relation = DiracRelation::identity(BondSpace());  ///< from the systems' ports to the outer ports
    ph::PHSystem system;
    std::vector<PortSpec> outer;
    /// Run parameters; empty when the document has no "simulate" block.
    Eigen::VectorXd x0;
    std::vector<ph::PortInput> inputs;
    std::vector<Eigen::VectorXd> samples;
};

struct ThermoDiagram {
    std::vector<std::string> names;
    std::vector<thermo::ThermoSystem> systems;
    thermo::AffineRelation relation;
    thermo::ConvexDomain outer;
    std::vector<Eigen::VectorXd> queries;
    bool has_gibbs = false;
    std::string gibbs_system;
    double T = 0;
    double p = 0;
    thermo::ReactionNetwork network;
    Eigen::VectorXd N0;
};

struct UwdDiagram {
    operad::UwdOperation operation;
    std::vector<operad::OpenGraph> graphs;  ///< optional algebra arguments, one per box
};

DiracDiagram compile_dirac(const json& doc);
PHDiagram compile_ph(const json& doc);
ThermoDiagram compile_thermo(const json& doc);
UwdDiagram compile_uwd(const json& doc);

/// Finite doubles become JSON numbers; ±∞ and NaN become the strings "inf", "-inf", "nan".
json number(double x);
json vector_json(const Eigen::VectorXd& v);
json matrix_json(const Eigen::MatrixXd& m);
thermo::ConvexDomain domain_from_json(const json& j);
json domain_json(const thermo::ConvexDomain& d);

} // namespace dirac::cli
