#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpjd/random.hpp"

namespace lpjd {

/// One input-labeled state transition of a finite-state channel.
/// `output` is the noiseless output symbol in signal units.
struct Transition {
    int from = 0;
    int input = 0;
    int to = 0;
    double output = 0.0;
};

/// Finite-state channel model: a state set, input-labeled transitions with
/// noiseless output symbols, and a start-state specification (fixed state or
/// a probability vector). For an intersymbol-interference channel the next
/// state is a deterministic function of (input, state), i.e. each (state,
/// input) pair has exactly one transition.
class ChannelModel {
  public:
    ChannelModel(int num_states, std::vector<Transition> transitions, int start_state)
        : num_states_(num_states), transitions_(std::move(transitions)), start_state_(start_state) {
        if (start_state < 0 || start_state >= num_states)
            throw std::invalid_argument("channel: start state out of range");
        start_dist_.assign(num_states, 0.0);
        start_dist_[start_state] = 1.0;
        validate();
    }

    ChannelModel(int num_states, std::vector<Transition> transitions, std::vector<double> start_dist)
        : num_states_(num_states), transitions_(std::move(transitions)), start_dist_(std::move(start_dist)) {
        if (static_cast<int>(start_dist_.size()) != num_states)
            throw std::invalid_argument("channel: start distribution size mismatch");
        double sum = 0.0;
        for (double p : start_dist_) {
            if (p < 0.0) throw std::invalid_argument("channel: negative start probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("channel: start distribution does not sum to 1");
        validate();
    }

    int num_states() const { return num_states_; }
    const std::vector<Transition>& transitions() const { return transitions_; }

    bool has_fixed_start() const { return start_state_.has_value(); }
    int start_state() const {
        if (!start_state_) throw std::logic_error("channel: start state is a distribution");
        return *start_state_;
    }
    /// Start prior over states (an indicator vector when the start is fixed).
    const std::vector<double>& start_dist() const { return start_dist_; }

    /// True when every (state, input) pair has exactly one outgoing
    /// transition, i.e. the next-state map is deterministic.
    bool is_fsisic() const {
        std::map<std::pair<int, int>, int> count;
        for (const auto& t : transitions_) count[{t.from, t.input}]++;
        for (int s = 0; s < num_states_; ++s)
            for (int x = 0; x < 2; ++x)
                if (count[{s, x}] != 1) return false;
        return true;
    }

    /// Number of transitions sharing (state, input); branch probability mass
    /// is split uniformly among them for generic finite-state channels.
    int branch_count(int from, int input) const {
        int c = 0;
        for (const auto& t : transitions_)
            if (t.from == from && t.input == input) ++c;
        return c;
    }

    /// The unique transition for (state, input); FSISIC only.
    const Transition& step(int from, int input) const {
        const Transition* found = nullptr;
        for (const auto& t : transitions_) {
            if (t.from == from && t.input == input) {
                if (found) throw std::logic_error("channel: nondeterministic (state,input)");
                found = &t;
            }
        }
        if (!found) throw std::logic_error("channel: missing transition");
        return *found;
    }

    /// Deterministic noiseless output path for an input bit vector (the
    /// signal-space codeword of those bits). FSISIC with fixed start only.
    std::vector<double> noiseless_output(const std::vector<uint8_t>& bits) const {
        if (!start_state_) throw std::invalid_argument("channel: noiseless path needs a fixed start state");
        std::vector<double> out(bits.size());
        int s = *start_state_;
        for (size_t i = 0; i < bits.size(); ++i) {
            const Transition& t = step(s, bits[i]);
            out[i] = t.output;
            s = t.to;
        }
        return out;
    }

    /// Mean output power under i.i.d. uniform inputs at stationarity,
    /// computed from the Cesaro average of the state distribution.
    double output_power() const {
        std::vector<double> pi(num_states_, 1.0 / num_states_);
        std::vector<double> cesaro(num_states_, 0.0);
        std::vector<double> next(num_states_);
        const int kMaxSteps = 20000;
        double prev_power = -1.0;
        for (int it = 1; it <= kMaxSteps; ++it) {
            for (int s = 0; s < num_states_; ++s) cesaro[s] += (pi[s] - cesaro[s]) / it;
            std::fill(next.begin(), next.end(), 0.0);
            for (const auto& t : transitions_) {
                double mass = pi[t.from] * 0.5 / branch_count(t.from, t.input);
                next[t.to] += mass;
            }
            pi.swap(next);
            if (it % 32 == 0) {
                double p = power_under(cesaro);
                if (prev_power >= 0.0 && std::abs(p - prev_power) < 1e-13) break;
                prev_power = p;
            }
        }
        return power_under(cesaro);
    }

    void save(std::ostream& os) const {
        os << "states " << num_states_ << "\n";
        if (start_state_) {
            os << "start " << *start_state_ << "\n";
        } else {
            os << "start_dist";
            for (double p : start_dist_) os << " " << p;
            os << "\n";
        }
        for (const auto& t : transitions_)
            os << "trans " << t.from << " " << t.input << " " << t.to << " " << t.output << "\n";
    }

    static ChannelModel load(std::istream& is) {
        int num_states = -1;
        std::optional<int> start;
        std::vector<double> start_dist;
        std::vector<Transition> trans;
        std::string line;
        while (std::getline(is, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string key;
            if (!(ls >> key)) continue;
            if (key == "states") {
                if (!(ls >> num_states)) throw std::runtime_error("channel file: bad states line");
            } else if (key == "start") {
                int s;
                if (!(ls >> s)) throw std::runtime_error("channel file: bad start line");
                start = s;
            } else if (key == "start_dist") {
                double p;
                while (ls >> p) start_dist.push_back(p);
            } else if (key == "trans") {
                Transition t;
                if (!(ls >> t.from >> t.input >> t.to >> t.output))
                    throw std::runtime_error("channel file: bad trans line");
                trans.push_back(t);
            } else {
                throw std::runtime_error("channel file: unknown key '" + key + "'");
            }
        }
        if (num_states <= 0) throw std::runtime_error("channel file: missing states line");
        if (start) return ChannelModel(num_states, std::move(trans), *start);
        if (!start_dist.empty()) return ChannelModel(num_states, std::move(trans), std::move(start_dist));
        throw std::runtime_error("channel file: missing start line");
    }

    static ChannelModel load_file(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cannot open channel file: " + path);
        return load(f);
    }

  private:
    void validate() const {
        for (const auto& t : transitions_) {
            if (t.from < 0 || t.from >= num_states_ || t.to < 0 || t.to >= num_states_)
                throw std::invalid_argument("channel: transition state out of range");
            if (t.input != 0 && t.input != 1)
                throw std::invalid_argument("channel: input must be a bit");
        }
    }

    double power_under(const std::vector<double>& pi) const {
        double p = 0.0;
        for (const auto& t : transitions_)
            p += pi[t.from] * 0.5 / branch_count(t.from, t.input) * t.output * t.output;
        return p;
    }

    int num_states_;
    std::vector<Transition> transitions_;
    std::optional<int> start_state_;
    std::vector<double> start_dist_;
};

/// Dicode channel 1 - z^-1 with antipodal symbol mapping 0 -> -1, 1 -> +1,
/// optionally with differential precoding of the input bits (pDIC). The
/// channel state is the previous (precoded) bit; outputs lie in {-2, 0, +2}.
inline ChannelModel make_dicode(bool precoded, std::optional<int> start_state = 0) {
    auto level = [](int bit) { return bit ? 1.0 : -1.0; };
    std::vector<Transition> trans;
    for (int s = 0; s < 2; ++s) {
        for (int x = 0; x < 2; ++x) {
            int emitted = precoded ? (x ^ s) : x;
            trans.push_back({s, x, emitted, level(emitted) - level(s)});
        }
    }
    if (start_state) return ChannelModel(2, std::move(trans), *start_state);
    return ChannelModel(2, std::move(trans), std::vector<double>{0.5, 0.5});
}

/// Built-in channels selectable by name: "dic", "pdic".
inline ChannelModel channel_by_name(const std::string& name) {
    if (name == "dic") return make_dicode(false);
    if (name == "pdic") return make_dicode(true);
    throw std::invalid_argument("unknown channel name: " + name + " (expected dic or pdic)");
}

/// SNR (dB) to noise standard deviation, with SNR defined as mean channel
/// output power divided by the noise variance.
inline double snr_db_to_sigma(double snr_db, const ChannelModel& ch) {
    double p_out = ch.output_power();
    return std::sqrt(p_out / std::pow(10.0, snr_db / 10.0));
}

struct TransmitResult {
    std::vector<double> y;      // received: clean + AWGN
    std::vector<double> clean;  // noiseless output path
};

/// Sends `bits` through the channel and adds white Gaussian noise of standard
/// deviation `sigma`. Reproducible from the seed.
inline TransmitResult transmit_awgn(const ChannelModel& ch, const std::vector<uint8_t>& bits,
                                    double sigma, uint64_t seed) {
    TransmitResult r;
    r.clean = ch.noiseless_output(bits);
    r.y.resize(r.clean.size());
    GaussianSampler noise(seed);
    for (size_t i = 0; i < r.clean.size(); ++i) r.y[i] = r.clean[i] + sigma * noise();
    return r;
}

}  // namespace lpjd
