#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpjd/random.hpp"

namespace lpjd {

/// Binary parity-check code stored as a sparse bipartite graph. Check and
/// bit adjacency lists are kept sorted so the layout is canonical.
class LdpcCode {
  public:
    LdpcCode(int n, std::vector<std::vector<int>> checks) : n_(n), checks_(std::move(checks)) {
        if (n_ < 1) throw std::invalid_argument("code: block length must be >= 1");
        bits_.resize(n_);
        for (int j = 0; j < num_checks(); ++j) {
            auto& row = checks_[j];
            std::sort(row.begin(), row.end());
            if (std::adjacent_find(row.begin(), row.end()) != row.end())
                throw std::invalid_argument("code: repeated bit in a check");
            for (int i : row) {
                if (i < 0 || i >= n_) throw std::invalid_argument("code: bit index out of range");
                bits_[i].push_back(j);
            }
        }
    }

    int block_length() const { return n_; }
    int num_checks() const { return static_cast<int>(checks_.size()); }
    const std::vector<int>& check_bits(int j) const { return checks_[j]; }
    const std::vector<int>& bit_checks(int i) const { return bits_[i]; }

    int num_edges() const {
        int e = 0;
        for (const auto& row : checks_) e += static_cast<int>(row.size());
        return e;
    }

    std::vector<uint8_t> syndrome(const std::vector<uint8_t>& bits) const {
        if (static_cast<int>(bits.size()) != n_)
            throw std::invalid_argument("syndrome: bit vector length mismatch");
        std::vector<uint8_t> s(num_checks(), 0);
        for (int j = 0; j < num_checks(); ++j)
            for (int i : checks_[j]) s[j] ^= bits[i] & 1;
        return s;
    }

    bool is_codeword(const std::vector<uint8_t>& bits) const {
        auto s = syndrome(bits);
        return std::all_of(s.begin(), s.end(), [](uint8_t v) { return v == 0; });
    }

    /// Basis of the solution space of H x = 0 over GF(2), found by Gaussian
    /// elimination. Deterministic for a given code.
    std::vector<std::vector<uint8_t>> null_space_basis() const {
        int m = num_checks();
        std::vector<std::vector<uint8_t>> h(m, std::vector<uint8_t>(n_, 0));
        for (int j = 0; j < m; ++j)
            for (int i : checks_[j]) h[j][i] = 1;
        std::vector<int> pivot_col;
        int r = 0;
        for (int c = 0; c < n_ && r < m; ++c) {
            int pr = -1;
            for (int j = r; j < m; ++j)
                if (h[j][c]) { pr = j; break; }
            if (pr < 0) continue;
            std::swap(h[r], h[pr]);
            for (int j = 0; j < m; ++j)
                if (j != r && h[j][c])
                    for (int i = c; i < n_; ++i) h[j][i] ^= h[r][i];
            pivot_col.push_back(c);
            ++r;
        }
        std::vector<uint8_t> is_pivot(n_, 0);
        for (int c : pivot_col) is_pivot[c] = 1;
        std::vector<std::vector<uint8_t>> basis;
        for (int c = 0; c < n_; ++c) {
            if (is_pivot[c]) continue;
            std::vector<uint8_t> v(n_, 0);
            v[c] = 1;
            for (int j = 0; j < r; ++j)
                if (h[j][c]) v[pivot_col[j]] = 1;
            basis.push_back(std::move(v));
        }
        return basis;
    }

    int rank() const { return n_ - static_cast<int>(null_space_basis().size()); }

    void save_alist(std::ostream& os) const {
        int m = num_checks();
        int dc_max = 0, dv_max = 0;
        for (const auto& row : checks_) dc_max = std::max(dc_max, static_cast<int>(row.size()));
        for (const auto& col : bits_) dv_max = std::max(dv_max, static_cast<int>(col.size()));
        os << n_ << " " << m << "\n" << dv_max << " " << dc_max << "\n";
        for (int i = 0; i < n_; ++i) os << bits_[i].size() << (i + 1 < n_ ? " " : "\n");
        for (int j = 0; j < m; ++j) os << checks_[j].size() << (j + 1 < m ? " " : "\n");
        for (int i = 0; i < n_; ++i) {
            for (int k = 0; k < dv_max; ++k) {
                int v = k < static_cast<int>(bits_[i].size()) ? bits_[i][k] + 1 : 0;
                os << v << (k + 1 < dv_max ? " " : "\n");
            }
        }
        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < dc_max; ++k) {
                int v = k < static_cast<int>(checks_[j].size()) ? checks_[j][k] + 1 : 0;
                os << v << (k + 1 < dc_max ? " " : "\n");
            }
        }
    }

    void save_alist_file(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open for writing: " + path);
        save_alist(os);
    }

    static LdpcCode load_alist(std::istream& is) {
        auto next = [&is]() {
            long long v;
            if (!(is >> v)) throw std::runtime_error("alist: truncated or malformed file");
            return v;
        };
        long long n = next(), m = next();
        if (n < 1 || m < 1 || n > 100000000 || m > 100000000)
            throw std::runtime_error("alist: implausible dimensions");
        long long dv_max = next(), dc_max = next();
        std::vector<long long> col_deg(n), row_deg(m);
        long long col_total = 0, row_total = 0;
        for (auto& d : col_deg) col_total += (d = next());
        for (auto& d : row_deg) row_total += (d = next());
        if (col_total != row_total) throw std::runtime_error("alist: degree sums disagree");
        std::vector<long long> rest;
        long long v;
        while (is >> v) rest.push_back(v);
        // padded files carry zero fill up to the maximum degree; reduced
        // files list exactly the degree counts
        size_t idx = 0;
        bool padded;
        if (static_cast<long long>(rest.size()) == n * dv_max + m * dc_max)
            padded = true;
        else if (static_cast<long long>(rest.size()) == col_total + row_total)
            padded = false;
        else
            throw std::runtime_error("alist: truncated or malformed file");
        for (long long i = 0; i < n; ++i) {
            long long take = padded ? dv_max : col_deg[i], seen = 0;
            for (long long k = 0; k < take; ++k)
                if (rest[idx++] != 0) ++seen;
            if (seen != col_deg[i]) throw std::runtime_error("alist: column degree mismatch");
        }
        std::vector<std::vector<int>> checks(m);
        for (long long j = 0; j < m; ++j) {
            long long take = padded ? dc_max : row_deg[j];
            for (long long k = 0; k < take; ++k) {
                long long b = rest[idx++];
                if (b < 0 || b > n) throw std::runtime_error("alist: bit index out of range");
                if (b != 0) checks[j].push_back(static_cast<int>(b - 1));
            }
            if (static_cast<long long>(checks[j].size()) != row_deg[j])
                throw std::runtime_error("alist: row degree mismatch");
        }
        return LdpcCode(static_cast<int>(n), std::move(checks));
    }

    static LdpcCode load_alist_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot open: " + path);
        return load_alist(is);
    }

  private:
    int n_;
    std::vector<std::vector<int>> checks_;
    std::vector<std::vector<int>> bits_;
};

inline LdpcCode single_parity_check_code(int n) {
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    return LdpcCode(n, {all});
}

namespace detail {

// Fisher-Yates with an explicit rejection draw so results do not depend on
// the standard library's shuffle implementation.
inline uint64_t bounded_rand(uint64_t& state, uint64_t bound) {
    uint64_t threshold = -bound % bound;
    for (;;) {
        uint64_t r = splitmix64(state);
        if (r >= threshold) return r % bound;
    }
}

inline void shuffle_ints(std::vector<int>& v, uint64_t& state) {
    for (size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[bounded_rand(state, i)]);
}

struct Graph {
    std::vector<std::vector<int>> check_bits;  // may hold repeats mid-repair
    std::vector<std::vector<int>> bit_checks;

    bool pair_is_bad(int check, int bit) const {
        int repeats = 0;
        for (int b : check_bits[check])
            if (b == bit) ++repeats;
        if (repeats > 1) return true;
        // a second shared bit with any neighboring check closes a 4-cycle
        for (int c2 : bit_checks[bit]) {
            if (c2 == check) continue;
            for (int b2 : check_bits[check]) {
                if (b2 == bit) continue;
                for (int c3 : bit_checks[b2])
                    if (c3 == c2) return true;
            }
        }
        return false;
    }
};

}  // namespace detail

/// Random (dv, dc)-regular code from a permuted socket assignment. Parallel
/// edges and 4-cycles are then removed by swapping bit endpoints between
/// random edge pairs until clean. Deterministic for a given seed.
inline LdpcCode gen_regular_code(int n, int dv, int dc, uint64_t seed) {
    if (n < 1 || dv < 1 || dc < 2) throw std::invalid_argument("gen_regular_code: bad parameters");
    if ((static_cast<long long>(n) * dv) % dc != 0)
        throw std::invalid_argument("gen_regular_code: n*dv must be divisible by dc");
    int m = n * dv / dc;
    if (dc > n) throw std::invalid_argument("gen_regular_code: check degree exceeds block length");
    uint64_t state = derive_seed(seed, 0x67656e63);  // independent stream per seed
    std::vector<int> sockets(static_cast<size_t>(n) * dv);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < dv; ++k) sockets[static_cast<size_t>(i) * dv + k] = i;
    detail::shuffle_ints(sockets, state);

    detail::Graph g;
    g.check_bits.assign(m, {});
    g.bit_checks.assign(n, {});
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < dc; ++k) {
            int bit = sockets[static_cast<size_t>(j) * dc + k];
            g.check_bits[j].push_back(bit);
            g.bit_checks[bit].push_back(j);
        }
    }

    auto detach = [&g](int check, int bit) {
        auto& bc = g.bit_checks[bit];
        bc.erase(std::find(bc.begin(), bc.end(), check));
    };
    auto attach = [&g](int check, int slot, int bit) {
        g.check_bits[check][slot] = bit;
        g.bit_checks[bit].push_back(check);
    };

    long long budget = 4000LL * n * dv + 200000;
    for (;;) {
        std::vector<std::pair<int, int>> bad;  // (check, slot)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < dc; ++k)
                if (g.pair_is_bad(j, g.check_bits[j][k])) bad.push_back({j, k});
        if (bad.empty()) break;
        auto [c1, k1] = bad[detail::bounded_rand(state, bad.size())];
        int c2 = static_cast<int>(detail::bounded_rand(state, m));
        int k2 = static_cast<int>(detail::bounded_rand(state, dc));
        int b1 = g.check_bits[c1][k1], b2 = g.check_bits[c2][k2];
        if (c1 == c2 || b1 == b2) continue;
        detach(c1, b1);
        detach(c2, b2);
        attach(c1, k1, b2);
        attach(c2, k2, b1);
        bool worse = g.pair_is_bad(c1, b2) || g.pair_is_bad(c2, b1);
        if (worse) {  // undo
            detach(c1, b2);
            detach(c2, b1);
            attach(c1, k1, b1);
            attach(c2, k2, b2);
        }
        if (--budget <= 0)
            throw std::runtime_error("gen_regular_code: graph repair did not converge");
    }
    return LdpcCode(n, std::move(g.check_bits));
}

}  // namespace lpjd
