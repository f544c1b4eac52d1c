#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "lpjd/random.hpp"
#include "lpjd/simplex.hpp"

using namespace lpjd;

#include "frozen_lps.inc"

namespace {

LpProblem from_frozen(const FrozenLp& f) {
    LpProblem p;
    for (int j = 0; j < f.n; ++j) p.add_variable(f.upper[j], f.cost[j]);
    for (int i = 0; i < f.m_eq; ++i) {
        std::vector<std::pair<int, double>> row;
        for (int j = 0; j < f.n; ++j)
            if (f.a_eq[i * f.n + j] != 0) row.push_back({j, f.a_eq[i * f.n + j]});
        p.add_eq(std::move(row), f.b_eq[i]);
    }
    for (int i = 0; i < f.m_ub; ++i) {
        std::vector<std::pair<int, double>> row;
        for (int j = 0; j < f.n; ++j)
            if (f.a_ub[i * f.n + j] != 0) row.push_back({j, f.a_ub[i * f.n + j]});
        p.add_ub(std::move(row), f.b_ub[i]);
    }
    return p;
}

void check_feasible(const LpProblem& p, const std::vector<double>& x, double tol = 1e-7) {
    for (int j = 0; j < p.num_vars(); ++j) {
        REQUIRE(x[j] >= -tol);
        REQUIRE(x[j] <= p.upper[j] + tol);
    }
    for (size_t i = 0; i < p.eq_rows.size(); ++i) {
        double s = 0;
        for (auto [j, v] : p.eq_rows[i]) s += v * x[j];
        REQUIRE_THAT(s, Catch::Matchers::WithinAbs(p.eq_rhs[i], tol));
    }
    for (size_t i = 0; i < p.ub_rows.size(); ++i) {
        double s = 0;
        for (auto [j, v] : p.ub_rows[i]) s += v * x[j];
        REQUIRE(s <= p.ub_rhs[i] + tol);
    }
}

// rank of the tight-constraint matrix; a vertex of the feasible region must
// pin down all n coordinates
bool is_vertex(const LpProblem& p, const std::vector<double>& x, double tol = 1e-7) {
    int n = p.num_vars();
    std::vector<std::vector<double>> rows;
    for (int j = 0; j < n; ++j) {
        if (x[j] <= tol || x[j] >= p.upper[j] - tol) {
            std::vector<double> r(n, 0.0);
            r[j] = 1.0;
            rows.push_back(std::move(r));
        }
    }
    for (size_t i = 0; i < p.eq_rows.size(); ++i) {
        std::vector<double> r(n, 0.0);
        for (auto [j, v] : p.eq_rows[i]) r[j] = v;
        rows.push_back(std::move(r));
    }
    for (size_t i = 0; i < p.ub_rows.size(); ++i) {
        double s = 0;
        for (auto [j, v] : p.ub_rows[i]) s += v * x[j];
        if (s >= p.ub_rhs[i] - tol) {
            std::vector<double> r(n, 0.0);
            for (auto [j, v] : p.ub_rows[i]) r[j] = v;
            rows.push_back(std::move(r));
        }
    }
    // Gaussian elimination with partial pivoting
    int rank = 0;
    for (int c = 0; c < n && rank < static_cast<int>(rows.size()); ++c) {
        int piv = -1;
        double best = 1e-6;
        for (size_t r = rank; r < rows.size(); ++r)
            if (std::abs(rows[r][c]) > best) best = std::abs(rows[r][c]), piv = static_cast<int>(r);
        if (piv < 0) continue;
        std::swap(rows[rank], rows[piv]);
        for (size_t r = 0; r < rows.size(); ++r) {
            if (static_cast<int>(r) == rank || std::abs(rows[r][c]) < 1e-12) continue;
            double f = rows[r][c] / rows[rank][c];
            for (int k = c; k < n; ++k) rows[r][k] -= f * rows[rank][k];
        }
        ++rank;
    }
    return rank == n;
}

}  // namespace

TEST_CASE("frozen reference problems reach the known optima") {
    for (const auto& f : frozen_lps()) {
        auto p = from_frozen(f);
        auto sol = solve_lp(p);
        REQUIRE(sol.status == LpStatus::optimal);
        REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(f.objective, 1e-8));
        check_feasible(p, sol.x);
        REQUIRE(is_vertex(p, sol.x));
    }
}

TEST_CASE("two variable box problem") {
    LpProblem p;
    p.add_variable(1.0, -1.0);
    p.add_variable(1.0, -1.0);
    p.add_ub({{0, 1.0}, {1, 1.0}}, 1.5);
    auto sol = solve_lp(p);
    REQUIRE(sol.status == LpStatus::optimal);
    REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(-1.5, 1e-9));
    REQUIRE_THAT(sol.x[0] + sol.x[1], Catch::Matchers::WithinAbs(1.5, 1e-9));
    REQUIRE((sol.x[0] > 1.0 - 1e-9 || sol.x[1] > 1.0 - 1e-9));
}

TEST_CASE("infeasible systems are reported") {
    {
        LpProblem p;
        p.add_variable(1.0, 1.0);
        p.add_eq({{0, 1.0}}, -1.0);
        REQUIRE(solve_lp(p).status == LpStatus::infeasible);
    }
    {
        LpProblem p;
        p.add_variable(1.0, 0.0);
        p.add_ub({{0, -1.0}}, -5.0);
        REQUIRE(solve_lp(p).status == LpStatus::infeasible);
    }
    {
        LpProblem p;
        p.add_variable(2.0, 1.0);
        p.add_variable(2.0, 1.0);
        p.add_eq({{0, 1.0}, {1, 1.0}}, 1.0);
        p.add_eq({{0, 1.0}, {1, 1.0}}, 2.0);
        REQUIRE(solve_lp(p).status == LpStatus::infeasible);
    }
}

TEST_CASE("unbounded rays are reported") {
    LpProblem p;
    p.add_variable(kInf, -1.0);
    p.add_variable(1.0, 0.0);
    p.add_ub({{1, 1.0}}, 0.5);
    REQUIRE(solve_lp(p).status == LpStatus::unbounded);
}

TEST_CASE("degenerate pivoting terminates") {
    // Beale's classic cycling instance
    LpProblem p;
    p.add_variable(kInf, -0.75);
    p.add_variable(kInf, 150.0);
    p.add_variable(kInf, -0.02);
    p.add_variable(kInf, 6.0);
    p.add_ub({{0, 0.25}, {1, -60.0}, {2, -0.04}, {3, 9.0}}, 0.0);
    p.add_ub({{0, 0.5}, {1, -90.0}, {2, -0.02}, {3, 3.0}}, 0.0);
    p.add_ub({{2, 1.0}}, 1.0);
    auto sol = solve_lp(p);
    REQUIRE(sol.status == LpStatus::optimal);
    REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(-0.05, 1e-9));
}

TEST_CASE("warm start reaches the same optimum") {
    const auto& f = frozen_lps()[0];
    auto p = from_frozen(f);
    auto cold = solve_lp(p);
    LpOptions opt;
    opt.start_at_upper = {0, 3, 7};
    auto warm = solve_lp(p, opt);
    REQUIRE(warm.status == LpStatus::optimal);
    REQUIRE_THAT(warm.objective, Catch::Matchers::WithinAbs(cold.objective, 1e-8));

    LpOptions bad;
    bad.start_at_upper = {99};
    REQUIRE_THROWS_AS(solve_lp(p, bad), std::invalid_argument);
}

TEST_CASE("solutions are reproducible") {
    const auto& f = frozen_lps()[2];
    auto p = from_frozen(f);
    auto a = solve_lp(p);
    auto b = solve_lp(p);
    REQUIRE(a.x == b.x);
    REQUIRE(a.iterations == b.iterations);
}

TEST_CASE("random feasible boxes solve to vertices") {
    for (uint64_t trial = 0; trial < 40; ++trial) {
        uint64_t state = derive_seed(0x5157, trial);
        auto draw = [&state](int lo, int hi) {
            return lo + static_cast<int>(splitmix64(state) % (hi - lo + 1));
        };
        int n = draw(4, 10), me = draw(0, 2), mu = draw(1, 4);
        LpProblem p;
        std::vector<double> x0(n);
        for (int j = 0; j < n; ++j) {
            double u = draw(1, 2);
            p.add_variable(u, draw(-8, 8) / 4.0);
            x0[j] = draw(0, static_cast<int>(4 * u)) / 4.0;
        }
        for (int i = 0; i < me; ++i) {
            std::vector<std::pair<int, double>> row;
            double b = 0;
            for (int j = 0; j < n; ++j) {
                int a = draw(-3, 3);
                if (a != 0) row.push_back({j, double(a)}), b += a * x0[j];
            }
            if (!row.empty()) p.add_eq(std::move(row), b);
        }
        for (int i = 0; i < mu; ++i) {
            std::vector<std::pair<int, double>> row;
            double b = 0;
            for (int j = 0; j < n; ++j) {
                int a = draw(-3, 3);
                if (a != 0) row.push_back({j, double(a)}), b += a * x0[j];
            }
            if (!row.empty()) p.add_ub(std::move(row), b + draw(0, 8) / 4.0);
        }
        auto sol = solve_lp(p);
        REQUIRE(sol.status == LpStatus::optimal);  // x0 is feasible by construction
        check_feasible(p, sol.x);
        double at_x0 = 0;
        for (int j = 0; j < n; ++j) at_x0 += p.cost[j] * x0[j];
        REQUIRE(sol.objective <= at_x0 + 1e-8);
        REQUIRE(is_vertex(p, sol.x));
    }
}

TEST_CASE("flow conservation systems with zero right hand sides") {
    // two parallel two-hop routes, unit mass, cheaper route wins
    LpProblem p;
    int a1 = p.add_variable(1.0, 1.0);
    int a2 = p.add_variable(1.0, 2.0);
    int b1 = p.add_variable(1.0, 1.0);
    int b2 = p.add_variable(1.0, 0.5);
    p.add_eq({{a1, 1.0}, {a2, 1.0}}, 1.0);
    p.add_eq({{a1, 1.0}, {b1, -1.0}}, 0.0);
    p.add_eq({{a2, 1.0}, {b2, -1.0}}, 0.0);
    auto sol = solve_lp(p);
    REQUIRE(sol.status == LpStatus::optimal);
    REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(2.0, 1e-9));
    REQUIRE_THAT(sol.x[a1], Catch::Matchers::WithinAbs(1.0, 1e-9));
    REQUIRE_THAT(sol.x[b2], Catch::Matchers::WithinAbs(0.0, 1e-9));
}

TEST_CASE("text rendering of a small problem") {
    LpProblem p;
    p.add_variable(1.0, 2.0);
    p.add_variable(kInf, -0.5);
    p.add_eq({{0, 1.0}, {1, 1.0}}, 1.0);
    p.add_ub({{0, 1.0}, {1, -2.0}}, 0.25);
    std::ostringstream os;
    write_lp_text(p, os);
    REQUIRE(os.str() ==
            "Minimize\n"
            " obj: 2 x0 - 0.5 x1\n"
            "Subject To\n"
            " eq0: 1 x0 + 1 x1 = 1\n"
            " ub0: 1 x0 - 2 x1 <= 0.25\n"
            "Bounds\n"
            " 0 <= x0 <= 1\n"
            " x1 >= 0\n"
            "End\n");
    std::ostringstream named;
    write_lp_text(p, named, [](int j) { return "g" + std::to_string(j); });
    REQUIRE(named.str().find("g0") != std::string::npos);
}
