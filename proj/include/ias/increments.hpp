#pragma once

#include <utility>
#include <vector>

#include "ias/linear_map.hpp"
#include "ias/types.hpp"

namespace ias {

// Quadrilateral grid graph for sparse-increment priors in 2D. Nodes are
// pixels; the boundary mask pins "bound" nodes to zero and the remaining
// "free" nodes carry the unknowns. L maps free nodal values to increments
// along the free edges (edges with at least one free endpoint; the bound
// side contributes value zero). M computes the circulation around every
// quadrilateral loop in clockwise order, with edges between two bound nodes
// contributing zero. Together they satisfy M L = 0, L has full column rank,
// and rank(L) + rank(M) = n_e.
struct IncrementGraph {
    Index grid_rows = 0;
    Index grid_cols = 0;
    Index n_v = 0;  // free nodes
    Index n_e = 0;  // free edges
    Index n_t = 0;  // loops (all cells, including bound-only ones)

    SparseMatrix L;  // n_e x n_v, entries in {-1, 0, +1}
    SparseMatrix M;  // n_t x n_e, entries in {-1, 0, +1}

    // node id = i*grid_cols + j  ->  free index, or -1 for bound nodes.
    std::vector<Index> free_index;
    // free index -> node id.
    std::vector<Index> free_nodes;
    // free edge -> (tail node id, head node id); oriented left-to-right and
    // top-to-bottom, increment = head - tail.
    std::vector<std::pair<Index, Index>> edges;
};

// Grid with the outer ring bound (zero-Dirichlet default).
IncrementGraph build_increment_graph(Index rows, Index cols);
// Custom mask, one flag per node, true = bound.
IncrementGraph build_increment_graph(Index rows, Index cols,
                                     const std::vector<bool>& bound_mask);

// ||M y|| / max(||y||, machine epsilon).
double circulation_residual(const IncrementGraph& g, const Vector& y);

// (L, L^{-1}) for the 1D chain with the x_0 = 0 convention.
std::pair<MapPtr, MapPtr> diff_1d(Index n);

}  // namespace ias
