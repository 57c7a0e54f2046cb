#pragma once

// Random generators shared by unit, property and acceptance tests.

#include <cstdint>
#include <random>
#include <vector>

#include "dirac/diracrel.hpp"
#include "dirac/exactlin.hpp"
#include "dirac/operad.hpp"

namespace testsupport {

using dirac::lin::Mat;
using dirac::lin::Rat;
using dirac::lin::Subspace;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(gen_); }
    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

/// Small rational such as -3/2, 0 with probability `zero_prob`.
Rat random_rat(Rng& rng, double zero_prob = 0.3);
Rat random_nonzero_rat(Rng& rng);
Mat random_mat(Rng& rng, std::size_t rows, std::size_t cols, double zero_prob = 0.3);
/// Span of `count` random vectors; rank may fall below `count`.
Subspace random_subspace(Rng& rng, std::size_t ambient, std::size_t count);
Mat random_skew(Rng& rng, std::size_t n, double zero_prob = 0.3);
dirac::lin::LinRel random_linrel(Rng& rng, std::size_t dom, std::size_t cod);

/// Random Dirac relation between sums of single ports, (𝔹¹)^⊕dom_ports ⇸ (𝔹¹)^⊕cod_ports. Each port independently takes
/// effort or flow as its free variable; the dependent variables are a random skew
/// image, so graph-type and non-graph-type relations both occur.
dirac::DiracRelation random_dirac_relation(Rng& rng, std::size_t dom_ports, std::size_t cod_ports);

/// Random Dirac structure on (𝔹¹)^⊕n.
dirac::DiracStructure random_dirac_structure(Rng& rng, std::size_t n);

/// Random wiring diagram with the given box port counts and outer port count.
dirac::operad::UwdOperation random_uwd(Rng& rng, std::vector<std::size_t> inner, std::size_t outer);
/// Random wiring diagram with `arity` boxes of 0..3 ports each.
dirac::operad::UwdOperation random_uwd(Rng& rng, std::size_t arity, std::size_t outer);
dirac::operad::OpenGraph random_open_graph(Rng& rng, std::size_t iface_size);

} // namespace testsupport
