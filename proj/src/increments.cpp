#include "ias/increments.hpp"

#include <limits>

#include "ias/errors.hpp"

namespace ias {

namespace {

struct EdgeRef {
    Index id;    // free-edge index or -1
    int sign;    // traversal sign when walking the loop clockwise
};

}  // namespace

IncrementGraph build_increment_graph(Index rows, Index cols) {
    std::vector<bool> mask(static_cast<std::size_t>(rows * cols), false);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            if (i == 0 || i == rows - 1 || j == 0 || j == cols - 1)
                mask[static_cast<std::size_t>(i * cols + j)] = true;
    return build_increment_graph(rows, cols, mask);
}

IncrementGraph build_increment_graph(Index rows, Index cols,
                                     const std::vector<bool>& bound_mask) {
    if (rows < 1 || cols < 1) throw DegenerateGrid("empty grid");
    if (bound_mask.size() != static_cast<std::size_t>(rows * cols))
        throw DomainError("bound mask size mismatch");

    IncrementGraph g;
    g.grid_rows = rows;
    g.grid_cols = cols;
    g.free_index.assign(static_cast<std::size_t>(rows * cols), -1);
    for (Index node = 0; node < rows * cols; ++node) {
        if (!bound_mask[static_cast<std::size_t>(node)]) {
            g.free_index[static_cast<std::size_t>(node)] = g.n_v++;
            g.free_nodes.push_back(node);
        }
    }
    if (g.n_v == 0) throw DegenerateGrid("grid has no free nodes");

    auto node_id = [cols](Index i, Index j) { return i * cols + j; };
    auto is_free = [&](Index node) {
        return g.free_index[static_cast<std::size_t>(node)] >= 0;
    };

    // Horizontal edges (i,j)->(i,j+1) first, then vertical (i,j)->(i+1,j),
    // both row-major; only edges touching a free node are kept.
    std::vector<Index> h_edge(static_cast<std::size_t>(rows * cols), -1);
    std::vector<Index> v_edge(static_cast<std::size_t>(rows * cols), -1);
    std::vector<Eigen::Triplet<double>> l_trip;
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j + 1 < cols; ++j) {
            const Index a = node_id(i, j), b = node_id(i, j + 1);
            if (!is_free(a) && !is_free(b)) continue;
            h_edge[static_cast<std::size_t>(a)] = g.n_e;
            g.edges.emplace_back(a, b);
            if (is_free(b))
                l_trip.emplace_back(g.n_e, g.free_index[static_cast<std::size_t>(b)], 1.0);
            if (is_free(a))
                l_trip.emplace_back(g.n_e, g.free_index[static_cast<std::size_t>(a)], -1.0);
            ++g.n_e;
        }
    }
    for (Index i = 0; i + 1 < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            const Index a = node_id(i, j), b = node_id(i + 1, j);
            if (!is_free(a) && !is_free(b)) continue;
            v_edge[static_cast<std::size_t>(a)] = g.n_e;
            g.edges.emplace_back(a, b);
            if (is_free(b))
                l_trip.emplace_back(g.n_e, g.free_index[static_cast<std::size_t>(b)], 1.0);
            if (is_free(a))
                l_trip.emplace_back(g.n_e, g.free_index[static_cast<std::size_t>(a)], -1.0);
            ++g.n_e;
        }
    }
    g.L.resize(g.n_e, g.n_v);
    g.L.setFromTriplets(l_trip.begin(), l_trip.end());

    // One loop per grid cell. Clockwise walk (rows grow downward):
    // top edge along its orientation, right edge along, bottom edge against,
    // left edge against.
    g.n_t = (rows - 1) * (cols - 1);
    std::vector<Eigen::Triplet<double>> m_trip;
    Index loop = 0;
    for (Index i = 0; i + 1 < rows; ++i) {
        for (Index j = 0; j + 1 < cols; ++j, ++loop) {
            const EdgeRef refs[4] = {
                {h_edge[static_cast<std::size_t>(node_id(i, j))], +1},
                {v_edge[static_cast<std::size_t>(node_id(i, j + 1))], +1},
                {h_edge[static_cast<std::size_t>(node_id(i + 1, j))], -1},
                {v_edge[static_cast<std::size_t>(node_id(i, j))], -1},
            };
            for (const EdgeRef& e : refs)
                if (e.id >= 0) m_trip.emplace_back(loop, e.id, e.sign);
        }
    }
    g.M.resize(g.n_t, g.n_e);
    g.M.setFromTriplets(m_trip.begin(), m_trip.end());
    return g;
}

double circulation_residual(const IncrementGraph& g, const Vector& y) {
    if (y.size() != g.n_e) throw DomainError("circulation: length mismatch");
    const double ny = y.norm();
    const double denom = std::max(ny, std::numeric_limits<double>::epsilon());
    return (g.M * y).norm() / denom;
}

std::pair<MapPtr, MapPtr> diff_1d(Index n) {
    if (n < 1) throw DomainError("diff_1d needs n >= 1");
    return {std::make_shared<Diff1dMap>(n), std::make_shared<CumSum1dMap>(n)};
}

}  // namespace ias
