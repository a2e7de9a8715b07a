#pragma once

#include <atomic>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "qdf/errors.hpp"
#include "qdf/fock.hpp"

namespace qdf {

// Rectangular sampling of the (q, p) plane, endpoints included.
struct PhaseGrid {
    double q_min = 0, q_max = 0;
    int n_q = 0;
    double p_min = 0, p_max = 0;
    int n_p = 0;

    void validate() const {
        if (n_q < 1 || n_p < 1) throw ParameterError("PhaseGrid: counts must be >= 1");
        if ((n_q >= 2 && q_max <= q_min) || (n_p >= 2 && p_max <= p_min))
            throw ParameterError("PhaseGrid: max must exceed min");
    }
    double q_at(int i) const { return n_q == 1 ? q_min : q_min + i * (q_max - q_min) / (n_q - 1); }
    double p_at(int j) const { return n_p == 1 ? p_min : p_min + j * (p_max - p_min) / (n_p - 1); }
};

// Controls every numerical route: integration box half-width (in the u, v
// quadrature variables), nodes per axis (odd, so the origin is a node), Fock
// truncation, and the series tail tolerance.
struct QuadratureSpec {
    double box_half_width = 10.0;
    int points_per_axis = 201;
    int fock_dim = 64;
    double series_tail_tol = 1e-10;

    void validate() const {
        if (box_half_width <= 0) throw ParameterError("QuadratureSpec: box half-width must be positive");
        if (points_per_axis < 33 || points_per_axis % 2 == 0)
            throw ParameterError("QuadratureSpec: points per axis must be odd and >= 33");
        if (fock_dim < 8) throw ParameterError("QuadratureSpec: fock dimension must be >= 8");
        if (!(series_tail_tol > 0.0 && series_tail_tol < 1e-2))
            throw ParameterError("QuadratureSpec: tail tolerance must lie in (0, 1e-2)");
    }
};

struct Provenance {
    std::string distribution;   // j | kirkwood | wigner | sparam
    std::string route;          // integral | trace | multiplier | general | wigner-fresnel | closed-form | reconstructed
    std::string state;          // descriptor of the evaluated state
    QuadratureSpec quad;
    std::vector<std::string> warnings;
    std::vector<std::string> errors;
    bool failed = false;
};

// Complex values sampled on a PhaseGrid; values(i, j) belongs to
// (q_at(i), p_at(j)).
struct ComplexField {
    Matrix values;
    PhaseGrid grid;
    Provenance provenance;

    bool finite() const { return values.allFinite(); }
};

namespace detail {

// Deterministic fan-out: the work item for index i never depends on the
// thread that runs it, so results are identical for any worker count.
inline void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    const int nt = std::min(threads, n);
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace detail

} // namespace qdf
