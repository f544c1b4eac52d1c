#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpjd {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Linear program in the form
///   min c'x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  0 <= x <= upper.
/// Rows are sparse lists of (variable, coefficient) pairs.
struct LpProblem {
    std::vector<double> upper, cost;
    std::vector<std::vector<std::pair<int, double>>> eq_rows, ub_rows;
    std::vector<double> eq_rhs, ub_rhs;

    int add_variable(double up, double c) {
        upper.push_back(up);
        cost.push_back(c);
        return static_cast<int>(upper.size()) - 1;
    }
    void add_eq(std::vector<std::pair<int, double>> entries, double rhs) {
        eq_rows.push_back(std::move(entries));
        eq_rhs.push_back(rhs);
    }
    void add_ub(std::vector<std::pair<int, double>> entries, double rhs) {
        ub_rows.push_back(std::move(entries));
        ub_rhs.push_back(rhs);
    }
    int num_vars() const { return static_cast<int>(upper.size()); }
    int num_rows() const { return static_cast<int>(eq_rows.size() + ub_rows.size()); }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
        default: return "iteration_limit";
    }
}

struct LpOptions {
    double tol = 1e-8;              // optimality / feasibility tolerance
    long long max_iterations = 1000000;
    int refactor_every = 64;        // basis updates between refactorizations
    std::vector<int> start_at_upper;  // variables crashed at their upper bound
};

struct LpSolution {
    LpStatus status = LpStatus::iteration_limit;
    std::vector<double> x;
    double objective = 0.0;
    long long iterations = 0;
};

/// CPLEX-style text rendering, mainly for debugging and external checks.
inline void write_lp_text(const LpProblem& p, std::ostream& os,
                          const std::function<std::string(int)>& var_name = nullptr) {
    auto name = [&](int j) { return var_name ? var_name(j) : "x" + std::to_string(j); };
    auto term = [&](std::ostream& o, double v, int j, bool lead) {
        if (v >= 0)
            o << (lead ? "" : " + ");
        else
            o << (lead ? "-" : " - ");
        o << std::abs(v) << " " << name(j);
    };
    os << "Minimize\n obj:";
    bool lead = true;
    for (int j = 0; j < p.num_vars(); ++j) {
        if (p.cost[j] == 0.0) continue;
        if (lead) os << " ";
        term(os, p.cost[j], j, lead);
        lead = false;
    }
    if (lead) os << " 0 " << name(0);
    os << "\nSubject To\n";
    for (size_t i = 0; i < p.eq_rows.size(); ++i) {
        os << " eq" << i << ":";
        bool first = true;
        for (auto [j, v] : p.eq_rows[i]) {
            if (first) os << " ";
            term(os, v, j, first);
            first = false;
        }
        os << " = " << p.eq_rhs[i] << "\n";
    }
    for (size_t i = 0; i < p.ub_rows.size(); ++i) {
        os << " ub" << i << ":";
        bool first = true;
        for (auto [j, v] : p.ub_rows[i]) {
            if (first) os << " ";
            term(os, v, j, first);
            first = false;
        }
        os << " <= " << p.ub_rhs[i] << "\n";
    }
    os << "Bounds\n";
    for (int j = 0; j < p.num_vars(); ++j) {
        if (p.upper[j] == kInf)
            os << " " << name(j) << " >= 0\n";
        else
            os << " 0 <= " << name(j) << " <= " << p.upper[j] << "\n";
    }
    os << "End\n";
}

namespace detail {

// Bounded-variable revised simplex over a sparse column store. The basis
// inverse is kept as a sparse LU factorization plus a product-form eta file,
// refactored periodically. All scans run in fixed index order and ties are
// broken by index, so results are bit-reproducible.
class Simplex {
  public:
    Simplex(const LpProblem& p, const LpOptions& opt) : opt_(opt) {
        n_struct_ = p.num_vars();
        m_eq_ = static_cast<int>(p.eq_rows.size());
        m_ = m_eq_ + static_cast<int>(p.ub_rows.size());

        cols_.resize(n_struct_);
        for (int i = 0; i < m_eq_; ++i)
            for (auto [j, v] : p.eq_rows[i])
                if (v != 0.0) cols_[j].push_back({i, v});
        for (size_t i = 0; i < p.ub_rows.size(); ++i)
            for (auto [j, v] : p.ub_rows[i])
                if (v != 0.0) cols_[j].push_back({m_eq_ + static_cast<int>(i), v});
        for (auto& col : cols_)
            std::sort(col.begin(), col.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

        lower_.assign(n_struct_, 0.0);
        upper_ = p.upper;
        cost_ = p.cost;
        rhs_.resize(m_);
        for (int i = 0; i < m_eq_; ++i) rhs_[i] = p.eq_rhs[i];
        for (size_t i = 0; i < p.ub_rows.size(); ++i) rhs_[m_eq_ + i] = p.ub_rhs[i];

        // slack for every inequality row
        slack0_ = n_struct_;
        for (int i = m_eq_; i < m_; ++i) {
            cols_.push_back({{i, 1.0}});
            lower_.push_back(0.0);
            upper_.push_back(kInf);
            cost_.push_back(0.0);
        }
    }

    LpSolution solve() {
        LpSolution sol;
        crash();
        long long iters = 0;

        if (num_artificial_ > 0) {
            std::vector<double> phase1(cols_.size(), 0.0);
            for (size_t j = art0_; j < cols_.size(); ++j) phase1[j] = 1.0;
            Outcome oc = run(phase1, iters, /*phase1=*/true);
            if (oc == Outcome::iteration_limit) return finish(sol, LpStatus::iteration_limit, iters);
            refactor();
            if (artificial_mass() > 100 * opt_.tol) return finish(sol, LpStatus::infeasible, iters);
            for (size_t j = art0_; j < cols_.size(); ++j) upper_[j] = 0.0;
        }

        for (int round = 0; round < 4; ++round) {
            Outcome oc = run(cost_, iters, /*phase1=*/false);
            if (oc == Outcome::unbounded) return finish(sol, LpStatus::unbounded, iters);
            if (oc == Outcome::iteration_limit) return finish(sol, LpStatus::iteration_limit, iters);
            // confirm optimality on a fresh factorization
            refactor();
            if (!has_eligible(cost_)) return finish(sol, LpStatus::optimal, iters);
        }
        return finish(sol, LpStatus::iteration_limit, iters);
    }

  private:
    enum class VStat : uint8_t { basic, at_lower, at_upper };
    enum class Outcome { optimal, unbounded, iteration_limit };

    struct Eta {
        int row;
        double pivot;
        std::vector<std::pair<int, double>> entries;  // includes the pivot row
    };

    // Initial point: requested variables at their upper bound, everything
    // else at lower. Slacks absorb inequality residuals when they can;
    // artificial columns cover equality rows and negative residuals.
    void crash() {
        vstat_.assign(cols_.size(), VStat::at_lower);
        for (int j : opt_.start_at_upper) {
            if (j < 0 || j >= n_struct_ || upper_[j] == kInf)
                throw std::invalid_argument("simplex: bad warm start variable");
            vstat_[j] = VStat::at_upper;  // repeats collapse here
        }
        std::vector<double> resid = rhs_;
        for (int j = 0; j < n_struct_; ++j) {
            if (vstat_[j] != VStat::at_upper) continue;
            for (auto [i, v] : cols_[j]) resid[i] -= upper_[j] * v;
        }
        basis_.assign(m_, -1);
        art0_ = cols_.size();
        num_artificial_ = 0;
        xb_.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            bool ineq = i >= m_eq_;
            if (ineq && resid[i] >= 0.0) {
                basis_[i] = slack0_ + (i - m_eq_);
                xb_[i] = resid[i];
            } else {
                double sgn = resid[i] >= 0.0 ? 1.0 : -1.0;
                cols_.push_back({{i, sgn}});
                lower_.push_back(0.0);
                upper_.push_back(kInf);
                cost_.push_back(0.0);
                vstat_.push_back(VStat::basic);
                basis_[i] = static_cast<int>(cols_.size()) - 1;
                xb_[i] = std::abs(resid[i]);
                ++num_artificial_;
            }
            vstat_[basis_[i]] = VStat::basic;
        }
        refactor();
    }

    void refactor() {
        Eigen::SparseMatrix<double> B(m_, m_);
        std::vector<Eigen::Triplet<double>> trip;
        for (int r = 0; r < m_; ++r)
            for (auto [i, v] : cols_[basis_[r]]) trip.push_back({i, r, v});
        B.setFromTriplets(trip.begin(), trip.end());
        lu_.compute(B);
        if (lu_.info() != Eigen::Success)
            throw std::runtime_error("simplex: singular basis factorization");
        etas_.clear();
        recompute_xb();
    }

    void recompute_xb() {
        Eigen::VectorXd r(m_);
        for (int i = 0; i < m_; ++i) r[i] = rhs_[i];
        for (size_t j = 0; j < cols_.size(); ++j) {
            if (vstat_[j] != VStat::at_upper) continue;
            for (auto [i, v] : cols_[j]) r[i] -= upper_[j] * v;
        }
        Eigen::VectorXd xb = lu_.solve(r);
        for (size_t k = 0; k < etas_.size(); ++k) apply_eta(etas_[k], xb);
        for (int i = 0; i < m_; ++i) xb_[i] = xb[i];
    }

    static void apply_eta(const Eta& e, Eigen::VectorXd& v) {
        double t = v[e.row] / e.pivot;
        if (t != 0.0)
            for (auto [i, w] : e.entries) v[i] -= w * t;
        v[e.row] = t;
    }

    static void apply_eta_transpose(const Eta& e, Eigen::VectorXd& v) {
        double dot = 0.0;
        for (auto [i, w] : e.entries)
            if (i != e.row) dot += w * v[i];
        v[e.row] = (v[e.row] - dot) / e.pivot;
    }

    void ftran(Eigen::VectorXd& v) const {
        v = lu_.solve(v);
        for (const auto& e : etas_) apply_eta(e, v);
    }

    void btran(Eigen::VectorXd& v) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) apply_eta_transpose(*it, v);
        v = lu_.transpose().solve(v);
    }

    double artificial_mass() const {
        double s = 0.0;
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= static_cast<int>(art0_)) s += std::abs(xb_[i]);
        return s;
    }

    Eigen::VectorXd dual(const std::vector<double>& c) const {
        Eigen::VectorXd y(m_);
        for (int i = 0; i < m_; ++i) y[i] = c[basis_[i]];
        btran(y);
        return y;
    }

    double reduced_cost(int j, const std::vector<double>& c, const Eigen::VectorXd& y) const {
        double d = c[j];
        for (auto [i, v] : cols_[j]) d -= y[i] * v;
        return d;
    }

    // entering column by Dantzig rule, or lowest eligible index under Bland
    int price(const std::vector<double>& c, const Eigen::VectorXd& y, bool bland) const {
        int best = -1;
        double best_score = opt_.tol;
        for (size_t j = 0; j < cols_.size(); ++j) {
            if (vstat_[j] == VStat::basic || upper_[j] - lower_[j] <= 0.0) continue;
            double d = reduced_cost(static_cast<int>(j), c, y);
            double score = vstat_[j] == VStat::at_lower ? -d : d;
            if (score <= opt_.tol) continue;
            if (bland) return static_cast<int>(j);
            if (score > best_score) {
                best_score = score;
                best = static_cast<int>(j);
            }
        }
        return best;
    }

    bool has_eligible(const std::vector<double>& c) const {
        return price(c, dual(c), false) >= 0;
    }

    Outcome run(const std::vector<double>& c, long long& iters, bool phase1) {
        const double piv_tol = 1e-9;
        int degen_streak = 0;
        bool bland = false;
        while (iters < opt_.max_iterations) {
            if (static_cast<int>(etas_.size()) >= opt_.refactor_every) refactor();
            if (phase1 && artificial_mass() <= 10 * opt_.tol) return Outcome::optimal;

            int j = price(c, dual(c), bland);
            if (j < 0) return Outcome::optimal;
            ++iters;

            Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
            for (auto [i, v] : cols_[j]) w[i] = v;
            ftran(w);
            double dir = vstat_[j] == VStat::at_lower ? 1.0 : -1.0;

            // ratio test over v = dir * w with x_B moving by -v t
            double span = upper_[j] - lower_[j];
            double t_best = span;
            int r_best = -1;       // -1 means the entering variable flips bound
            bool leave_upper = false;
            struct Cand {
                int row;
                double t, mag;
                bool upper;
            };
            std::vector<Cand> cands;
            double t_min = span;
            for (int i = 0; i < m_; ++i) {
                double v = dir * w[i];
                if (v > piv_tol) {
                    double t = (xb_[i] - lower_[basis_[i]]) / v;
                    cands.push_back({i, std::max(t, 0.0), v, false});
                } else if (v < -piv_tol && upper_[basis_[i]] != kInf) {
                    double t = (upper_[basis_[i]] - xb_[i]) / (-v);
                    cands.push_back({i, std::max(t, 0.0), -v, true});
                }
            }
            for (const auto& cd : cands) t_min = std::min(t_min, cd.t);
            if (t_min == kInf) return Outcome::unbounded;

            double window = bland ? 1e-12 : 1e-9;
            double best_mag = 0.0;
            for (const auto& cd : cands) {
                if (cd.t > t_min + window) continue;
                bool better;
                if (bland)
                    better = r_best < 0 || basis_[cd.row] < basis_[r_best];
                else
                    better = cd.mag > best_mag ||
                             (cd.mag == best_mag && r_best >= 0 && basis_[cd.row] < basis_[r_best]);
                if (better) {
                    r_best = cd.row;
                    best_mag = cd.mag;
                    leave_upper = cd.upper;
                    t_best = cd.t;
                }
            }
            if (r_best >= 0 && span < t_best) r_best = -1;  // bound flip wins

            if (r_best < 0) {
                // entering variable moves across its whole range
                for (int i = 0; i < m_; ++i) xb_[i] -= dir * w[i] * span;
                vstat_[j] = vstat_[j] == VStat::at_lower ? VStat::at_upper : VStat::at_lower;
                degen_streak = 0;
                bland = false;
                continue;
            }

            double t = t_best;
            for (int i = 0; i < m_; ++i) xb_[i] -= dir * w[i] * t;
            int leaving = basis_[r_best];
            vstat_[leaving] = leave_upper ? VStat::at_upper : VStat::at_lower;
            double enter_val =
                vstat_[j] == VStat::at_lower ? lower_[j] + t : upper_[j] - t;
            vstat_[j] = VStat::basic;
            basis_[r_best] = j;
            xb_[r_best] = enter_val;

            Eta eta;
            eta.row = r_best;
            eta.pivot = w[r_best];
            for (int i = 0; i < m_; ++i)
                if (i == r_best || std::abs(w[i]) > 1e-12) eta.entries.push_back({i, w[i]});
            etas_.push_back(std::move(eta));

            if (t <= 1e-10) {
                if (++degen_streak > 40) bland = true;
            } else {
                degen_streak = 0;
                bland = false;
            }
        }
        return Outcome::iteration_limit;
    }

    LpSolution finish(LpSolution& sol, LpStatus st, long long iters) {
        sol.status = st;
        sol.iterations = iters;
        sol.x.assign(n_struct_, 0.0);
        for (int j = 0; j < n_struct_; ++j)
            if (vstat_[j] == VStat::at_upper) sol.x[j] = upper_[j];
        for (int i = 0; i < m_; ++i)
            if (basis_[i] < n_struct_) sol.x[basis_[i]] = xb_[i];
        for (int j = 0; j < n_struct_; ++j) {
            sol.x[j] = std::max(sol.x[j], 0.0);
            if (upper_[j] != kInf) sol.x[j] = std::min(sol.x[j], upper_[j]);
        }
        sol.objective = 0.0;
        for (int j = 0; j < n_struct_; ++j) sol.objective += cost_[j] * sol.x[j];
        return sol;
    }

    LpOptions opt_;
    int n_struct_ = 0, m_eq_ = 0, m_ = 0, slack0_ = 0, num_artificial_ = 0;
    size_t art0_ = 0;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> lower_, upper_, cost_, rhs_, xb_;
    std::vector<int> basis_;
    std::vector<VStat> vstat_;
    mutable Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;  // transpose() is non-const
    std::vector<Eta> etas_;
};

}  // namespace detail

inline LpSolution solve_lp(const LpProblem& p, const LpOptions& opt = {}) {
    if (p.num_vars() == 0) throw std::invalid_argument("solve_lp: no variables");
    for (double u : p.upper)
        if (u < 0.0) throw std::invalid_argument("solve_lp: negative upper bound");
    detail::Simplex s(p, opt);
    return s.solve();
}

}  // namespace lpjd
