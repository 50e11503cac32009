#pragma once

#include <iosfwd>
#include <string>

#include "cutgraph/graphgen.hpp"
#include "cutgraph/hypergraph.hpp"
#include "cutgraph/kernel.hpp"

namespace cutgraph {

// Kernel document: {"masses": [..], "values": [[..], ..]}, optional
// "signed": true.
StepKernel load_kernel(const std::string& path);
void save_kernel(const StepKernel& k, const std::string& path);

// Matrix document: {"n": N, "entries": [[..], ..]} dense, or
// {"n": N, "entries": [[i, j, a], ..], "sparse": true} with i <= j and
// symmetric completion implied, or the typed form
// {"n": N, "types": [..], "kernel": {..}}.
WeightMatrix load_matrix(const std::string& path);
void save_matrix(const WeightMatrix& a, const std::string& path,
                 bool sparse = false);

// Graph file: header "n m" or "n m multi", then m lines "u v", 0-based.
SparseGraph load_graph(const std::string& path);
void save_graph(const SparseGraph& g, const std::string& path);
SparseGraph read_graph(std::istream& in);
void write_graph(const SparseGraph& g, std::ostream& out);

// Hypermatrix file: header "n R", then lines "r i1 .. ir value" with
// sorted distinct indices.
SparseHypermatrix load_hypermatrix(const std::string& path);
void save_hypermatrix(const SparseHypermatrix& h, const std::string& path);

// Hyperkernel document: {"masses": [..], "layers": [{"arity": r,
// "values": [..m^r row-major..]}, ..]}.
HyperStepKernel load_hyperkernel(const std::string& path);
void save_hyperkernel(const HyperStepKernel& k, const std::string& path);

}  // namespace cutgraph
