#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "lpjd/channel.hpp"

namespace lpjd {

/// One trellis edge: an input-labeled state transition at a specific time.
struct TrellisEdge {
    int time = 0;  // 0-based section index in [0, n)
    int from = 0;
    int to = 0;
    int input = 0;
    double output = 0.0;
    double branch_prob = 1.0;  // mass of this branch given (from, input)
};

/// Time-expansion of a channel state diagram over a block of length n.
/// Edges are stored sorted by (time, from, input, to); that order is the
/// canonical layout of edge-flow vectors and the deterministic tie-break
/// order used throughout. Immutable after construction.
class Trellis {
  public:
    Trellis(int n, int num_states, bool fsisic, std::vector<TrellisEdge> edges,
            std::vector<double> start_prior)
        : n_(n), num_states_(num_states), fsisic_(fsisic), edges_(std::move(edges)),
          start_prior_(std::move(start_prior)) {
        time_begin_.assign(n_ + 1, 0);
        for (const auto& e : edges_) time_begin_[e.time + 1]++;
        for (int t = 0; t < n_; ++t) time_begin_[t + 1] += time_begin_[t];
        in_edges_.assign(static_cast<size_t>(n_) * num_states_, {});
        out_edges_.assign(static_cast<size_t>(n_) * num_states_, {});
        for (int i = 0; i < num_edges(); ++i) {
            const auto& e = edges_[i];
            out_edges_[static_cast<size_t>(e.time) * num_states_ + e.from].push_back(i);
            in_edges_[static_cast<size_t>(e.time) * num_states_ + e.to].push_back(i);
        }
    }

    int block_length() const { return n_; }
    int num_states() const { return num_states_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    bool is_fsisic() const { return fsisic_; }
    const TrellisEdge& edge(int i) const { return edges_[i]; }
    const std::vector<TrellisEdge>& edges() const { return edges_; }
    const std::vector<double>& start_prior() const { return start_prior_; }

    /// Edge indices at section t form the contiguous range [begin, end).
    std::pair<int, int> time_range(int t) const { return {time_begin_[t], time_begin_[t + 1]}; }

    const std::vector<int>& in_edges(int t, int state) const {
        return in_edges_[static_cast<size_t>(t) * num_states_ + state];
    }
    const std::vector<int>& out_edges(int t, int state) const {
        return out_edges_[static_cast<size_t>(t) * num_states_ + state];
    }

    /// States with at least one incoming edge at section t (the reachable
    /// states at time boundary t+1).
    std::vector<int> reachable_after(int t) const {
        std::vector<int> states;
        for (int s = 0; s < num_states_; ++s)
            if (!in_edges(t, s).empty()) states.push_back(s);
        return states;
    }

  private:
    int n_;
    int num_states_;
    bool fsisic_;
    std::vector<TrellisEdge> edges_;
    std::vector<double> start_prior_;
    std::vector<int> time_begin_;
    std::vector<std::vector<int>> in_edges_, out_edges_;
};

/// Unrolls the channel into a length-n trellis. A fixed start state is
/// realized by omitting t=0 edges from all other states; unreachable states
/// are pruned at every later section.
inline Trellis build_trellis(const ChannelModel& ch, int n) {
    if (n < 1) throw std::invalid_argument("trellis: block length must be >= 1");
    std::vector<TrellisEdge> edges;
    std::set<int> reach;
    for (int s = 0; s < ch.num_states(); ++s)
        if (ch.start_dist()[s] > 0.0) reach.insert(s);
    for (int t = 0; t < n; ++t) {
        std::set<int> next;
        for (int s : reach) {
            for (int x = 0; x < 2; ++x) {
                int branches = ch.branch_count(s, x);
                for (const auto& tr : ch.transitions()) {
                    if (tr.from != s || tr.input != x) continue;
                    edges.push_back({t, s, tr.to, x, tr.output, 1.0 / branches});
                    next.insert(tr.to);
                }
            }
        }
        reach.swap(next);
    }
    // canonical order: (time, from, input, to)
    std::sort(edges.begin(), edges.end(), [](const TrellisEdge& a, const TrellisEdge& b) {
        if (a.time != b.time) return a.time < b.time;
        if (a.from != b.from) return a.from < b.from;
        if (a.input != b.input) return a.input < b.input;
        return a.to < b.to;
    });
    return Trellis(n, ch.num_states(), ch.is_fsisic(), std::move(edges), ch.start_dist());
}

enum class CostMode { squared, loglik };

/// Per-edge branch costs; `mode` records the unit convention.
struct BranchCosts {
    CostMode mode = CostMode::squared;
    std::vector<double> values;
};

/// AWGN branch metrics. squared: (y_t - a(e))^2. loglik: exact negative log
/// density -ln(branch_prob * N(y_t; a(e), sigma^2)), plus -ln P(s(e)) at the
/// first section. Both modes have the same argmin over any polytope with
/// unit per-time flow when the start prior is degenerate or uniform.
inline BranchCosts branch_costs(const Trellis& tr, std::span<const double> y, double sigma,
                                CostMode mode = CostMode::squared) {
    if (static_cast<int>(y.size()) != tr.block_length())
        throw std::invalid_argument("branch_costs: received vector length mismatch");
    if (sigma <= 0.0) throw std::invalid_argument("branch_costs: sigma must be positive");
    BranchCosts bc;
    bc.mode = mode;
    bc.values.resize(tr.num_edges());
    const double log_norm = 0.5 * std::log(2.0 * M_PI * sigma * sigma);
    for (int i = 0; i < tr.num_edges(); ++i) {
        const auto& e = tr.edge(i);
        double d = y[e.time] - e.output;
        if (mode == CostMode::squared) {
            bc.values[i] = d * d;
        } else {
            bc.values[i] = log_norm + d * d / (2.0 * sigma * sigma) - std::log(e.branch_prob);
            if (e.time == 0) bc.values[i] -= std::log(tr.start_prior()[e.from]);
        }
    }
    return bc;
}

struct ViterbiResult {
    std::vector<int> path;  // one edge index per section
    double cost = 0.0;
};

/// Minimum-cost edge path through the trellis. Ties are broken toward the
/// lowest edge index (edges scanned in canonical order, strict improvement).
inline ViterbiResult viterbi(const Trellis& tr, const BranchCosts& costs) {
    const double inf = std::numeric_limits<double>::infinity();
    int n = tr.block_length(), S = tr.num_states();
    std::vector<double> best(S, inf), next(S);
    std::vector<std::vector<int>> back(n, std::vector<int>(S, -1));
    for (int s = 0; s < S; ++s)
        if (tr.start_prior()[s] > 0.0) best[s] = 0.0;
    for (int t = 0; t < n; ++t) {
        std::fill(next.begin(), next.end(), inf);
        auto [b, e] = tr.time_range(t);
        for (int i = b; i < e; ++i) {
            const auto& ed = tr.edge(i);
            if (best[ed.from] == inf) continue;
            double c = best[ed.from] + costs.values[i];
            if (c < next[ed.to]) {
                next[ed.to] = c;
                back[t][ed.to] = i;
            }
        }
        best.swap(next);
    }
    int end_state = -1;
    double end_cost = inf;
    for (int s = 0; s < S; ++s)
        if (best[s] < end_cost) end_cost = best[s], end_state = s;
    if (end_state < 0) throw std::runtime_error("viterbi: trellis has no complete path");
    ViterbiResult r;
    r.cost = end_cost;
    r.path.resize(n);
    int s = end_state;
    for (int t = n - 1; t >= 0; --t) {
        int i = back[t][s];
        r.path[t] = i;
        s = tr.edge(i).from;
    }
    return r;
}

/// Projection of an edge flow onto per-bit values: f_i sums the flow on
/// input-1 edges at section i.
inline std::vector<double> project_bits(const Trellis& tr, std::span<const double> flow) {
    if (static_cast<int>(flow.size()) != tr.num_edges())
        throw std::invalid_argument("project_bits: flow dimension mismatch");
    std::vector<double> f(tr.block_length(), 0.0);
    for (int i = 0; i < tr.num_edges(); ++i)
        if (tr.edge(i).input == 1) f[tr.edge(i).time] += flow[i];
    return f;
}

/// Signal-space projection: p_i averages the noiseless outputs at section i
/// under the flow. Equals the clean output path for an integral flow.
inline std::vector<double> project_signal(const Trellis& tr, std::span<const double> flow) {
    if (static_cast<int>(flow.size()) != tr.num_edges())
        throw std::invalid_argument("project_signal: flow dimension mismatch");
    std::vector<double> p(tr.block_length(), 0.0);
    for (int i = 0; i < tr.num_edges(); ++i) p[tr.edge(i).time] += flow[i] * tr.edge(i).output;
    return p;
}

/// The unique edge path consistent with an input bit vector (FSISIC with a
/// fixed start state).
inline std::vector<int> input_edge_path(const Trellis& tr, const std::vector<uint8_t>& bits) {
    if (static_cast<int>(bits.size()) != tr.block_length())
        throw std::invalid_argument("input_edge_path: bit vector length mismatch");
    if (!tr.is_fsisic()) throw std::invalid_argument("input_edge_path: channel is not a FSISIC");
    int start = -1;
    for (int s = 0; s < tr.num_states(); ++s) {
        if (tr.start_prior()[s] > 0.0) {
            if (start >= 0) throw std::invalid_argument("input_edge_path: start state not fixed");
            start = s;
        }
    }
    std::vector<int> path(tr.block_length(), -1);
    int s = start;
    for (int t = 0; t < tr.block_length(); ++t) {
        for (int i : tr.out_edges(t, s)) {
            if (tr.edge(i).input == bits[t]) {
                path[t] = i;
                s = tr.edge(i).to;
                break;
            }
        }
        if (path[t] < 0) throw std::logic_error("input_edge_path: missing edge");
    }
    return path;
}

/// 0/1 edge-flow indicator of an edge path.
inline std::vector<double> flow_from_path(const Trellis& tr, const std::vector<int>& path) {
    std::vector<double> g(tr.num_edges(), 0.0);
    for (int i : path) g[i] = 1.0;
    return g;
}

}  // namespace lpjd
