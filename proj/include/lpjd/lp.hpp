#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lpjd/ldpc.hpp"
#include "lpjd/simplex.hpp"
#include "lpjd/trellis.hpp"

namespace lpjd {

/// Flows whose entries all sit within this distance of 0 or 1 are treated
/// as integral.
constexpr double kIntegralityTol = 1e-6;

/// Edge-flow polytope of the trellis: unit mass at the first section plus
/// flow conservation at every interior state. Variables are edge flows in
/// canonical edge order, each bounded to [0, 1].
inline LpProblem build_flow_lp(const Trellis& tr) {
    LpProblem p;
    for (int i = 0; i < tr.num_edges(); ++i) p.add_variable(1.0, 0.0);
    {
        std::vector<std::pair<int, double>> row;
        auto [b, e] = tr.time_range(0);
        for (int i = b; i < e; ++i) row.push_back({i, 1.0});
        p.add_eq(std::move(row), 1.0);
    }
    for (int t = 0; t + 1 < tr.block_length(); ++t) {
        for (int s = 0; s < tr.num_states(); ++s) {
            const auto& in = tr.in_edges(t, s);
            const auto& out = tr.out_edges(t + 1, s);
            if (in.empty() && out.empty()) continue;
            std::vector<std::pair<int, double>> row;
            for (int i : in) row.push_back({i, 1.0});
            for (int i : out) row.push_back({i, -1.0});
            p.add_eq(std::move(row), 0.0);
        }
    }
    return p;
}

/// Adds the parity relaxation to a flow polytope: for every check and every
/// odd-sized subset S of its bits,
///   sum_{i in S} f_i - sum_{i in N(j)\S} f_i <= |S| - 1,
/// written directly on the input-1 edge flows that define each f_i.
inline void add_parity_rows(LpProblem& p, const Trellis& tr, const LdpcCode& code) {
    if (code.block_length() != tr.block_length())
        throw std::invalid_argument("parity rows: code and trellis lengths differ");
    std::vector<std::vector<int>> one_edges(tr.block_length());
    for (int i = 0; i < tr.num_edges(); ++i)
        if (tr.edge(i).input == 1) one_edges[tr.edge(i).time].push_back(i);
    for (int j = 0; j < code.num_checks(); ++j) {
        const auto& bits = code.check_bits(j);
        int d = static_cast<int>(bits.size());
        if (d > 30) throw std::invalid_argument("parity rows: check degree too large to expand");
        for (uint32_t mask = 0; mask < (1u << d); ++mask) {
            if (__builtin_popcount(mask) % 2 == 0) continue;
            std::vector<std::pair<int, double>> row;
            for (int k = 0; k < d; ++k) {
                double sign = (mask >> k) & 1 ? 1.0 : -1.0;
                for (int e : one_edges[bits[k]]) row.push_back({e, sign});
            }
            p.add_ub(std::move(row), __builtin_popcount(mask) - 1.0);
        }
    }
}

struct LpDecodeResult {
    LpStatus status = LpStatus::iteration_limit;
    std::vector<double> flow;       // per edge, canonical order
    std::vector<double> soft_bits;  // flow projected onto bit positions
    std::vector<uint8_t> hard_bits;
    bool integral = false;
    bool codeword = false;
    bool ml_certificate = false;  // integral optimum over the joint polytope
    double objective = 0.0;
    long long iterations = 0;
};

inline bool flow_is_integral(const std::vector<double>& g, double tol = kIntegralityTol) {
    for (double v : g)
        if (std::abs(v) > tol && std::abs(v - 1.0) > tol) return false;
    return true;
}

/// Minimum-cost flow decoder over the trellis polytope, optionally
/// intersected with the parity relaxation of a code. The simplex solver
/// always lands on a vertex, so fractional outputs are genuine vertices of
/// the relaxation rather than interior points.
class LpDecoder {
  public:
    explicit LpDecoder(Trellis tr) : tr_(std::move(tr)), base_(build_flow_lp(tr_)) {}

    LpDecoder(Trellis tr, LdpcCode code)
        : tr_(std::move(tr)), code_(std::move(code)), base_(build_flow_lp(tr_)), joint_(true) {
        add_parity_rows(base_, tr_, *code_);
    }

    const Trellis& trellis() const { return tr_; }
    const LpProblem& problem() const { return base_; }
    bool joint() const { return joint_; }

    /// Decode with precomputed branch costs. `warm_edges` seeds the crash
    /// point with an edge path (for instance the unconstrained shortest
    /// path), which often makes the feasibility phase trivial.
    LpDecodeResult decode(const BranchCosts& costs, const std::vector<int>& warm_edges = {}) {
        if (static_cast<int>(costs.values.size()) != tr_.num_edges())
            throw std::invalid_argument("decode: cost vector length mismatch");
        base_.cost = costs.values;
        LpOptions opt;
        opt.start_at_upper = warm_edges;
        auto sol = solve_lp(base_, opt);

        LpDecodeResult r;
        r.status = sol.status;
        r.iterations = sol.iterations;
        r.objective = sol.objective;
        if (sol.status != LpStatus::optimal) return r;
        r.flow = std::move(sol.x);
        r.soft_bits = project_bits(tr_, r.flow);
        r.hard_bits.resize(r.soft_bits.size());
        for (size_t i = 0; i < r.soft_bits.size(); ++i)
            r.hard_bits[i] = r.soft_bits[i] >= 0.5 ? 1 : 0;
        r.integral = flow_is_integral(r.flow);
        r.codeword = r.integral && (!joint_ || code_->is_codeword(r.hard_bits));
        r.ml_certificate = joint_ && r.integral && r.codeword;
        return r;
    }

    /// Convenience entry point from a received vector.
    LpDecodeResult decode_received(const std::vector<double>& y, bool warm = true) {
        auto costs = branch_costs(tr_, y, 1.0, CostMode::squared);
        std::vector<int> warm_edges;
        if (warm) warm_edges = viterbi(tr_, costs).path;
        return decode(costs, warm_edges);
    }

  private:
    Trellis tr_;
    std::optional<LdpcCode> code_;
    LpProblem base_;
    bool joint_ = false;
};

}  // namespace lpjd
