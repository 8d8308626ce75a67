#pragma once

#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "csirl/env.hpp"
#include "csirl/errors.hpp"
#include "csirl/mat.hpp"
#include "csirl/rng.hpp"

namespace csirl::data {

// One environment interaction. Rewards are intentionally NOT stored: the
// local reward depends on the current subgoal and generator parameters, so it
// is reconstructed at sample time.
struct Transition {
    std::vector<double> s, a, s_next;
    bool done = false;
};

struct TransitionView {
    std::span<const double> s, a, s_next;
    bool done = false;
};

struct Trajectory {
    std::string env_name;
    std::vector<Transition> steps;

    int length() const { return static_cast<int>(steps.size()); }   // T
    int state_count() const { return length() + 1; }                // T + 1

    // States s_0 .. s_T; s_p for p < T comes from steps[p].s, s_T from the
    // final step's s_next.
    std::span<const double> state_at(int p) const {
        if (p < 0 || p > length()) throw InvalidInputError("Trajectory::state_at: index out of range");
        if (p < length()) return steps[p].s;
        return steps.back().s_next;
    }

    // Chaining (s_next[t] == s[t+1]), dims, and terminal-done invariants.
    void validate(const env::EnvSpec& spec) const {
        if (steps.empty()) throw SchemaError("trajectory: empty");
        for (size_t t = 0; t < steps.size(); ++t) {
            const Transition& tr = steps[t];
            if (static_cast<int>(tr.s.size()) != spec.state_dim ||
                static_cast<int>(tr.s_next.size()) != spec.state_dim ||
                static_cast<int>(tr.a.size()) != spec.action_dim)
                throw SchemaError("trajectory: transition dims do not match env " + spec.name_str());
            if (t + 1 < steps.size() && tr.s_next != steps[t + 1].s)
                throw SchemaError("trajectory: broken state chain at step " + std::to_string(t));
        }
        if (!steps.back().done) throw SchemaError("trajectory: final transition must be terminal");
    }
};

// ---------------------------------------------------------------------------
// Persistence: one JSON object per line,
//   {"env": name, "states": [[...] x (T+1)], "actions": [[...] x T]}
// Doubles round-trip losslessly (shortest-representation printing).

inline void save_trajectories(const std::string& path, const std::vector<Trajectory>& trajs) {
    std::ofstream f(path);
    if (!f) throw Error("save_trajectories: cannot open " + path + " for writing");
    for (const Trajectory& traj : trajs) {
        nlohmann::json j;
        j["env"] = traj.env_name;
        auto& states = j["states"] = nlohmann::json::array();
        auto& actions = j["actions"] = nlohmann::json::array();
        for (int p = 0; p < traj.state_count(); ++p) {
            const auto s = traj.state_at(p);
            states.push_back(std::vector<double>(s.begin(), s.end()));
        }
        for (const Transition& tr : traj.steps) actions.push_back(tr.a);
        f << j.dump() << "\n";
    }
    if (!f) throw Error("save_trajectories: write to " + path + " failed");
}

inline std::vector<Trajectory> load_trajectories(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("load_trajectories: cannot open " + path);
    std::vector<Trajectory> out;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        Trajectory traj;
        try {
            traj.env_name = j.at("env").get<std::string>();
            const auto& states = j.at("states");
            const auto& actions = j.at("actions");
            if (!states.is_array() || !actions.is_array() || states.size() != actions.size() + 1 ||
                actions.empty())
                throw SchemaError(path + ":" + std::to_string(lineno) +
                                  ": need T+1 states and T>=1 actions");
            const env::EnvSpec spec = env::EnvSpec::by_name(traj.env_name);
            for (size_t t = 0; t < actions.size(); ++t) {
                Transition tr;
                tr.s = states[t].get<std::vector<double>>();
                tr.a = actions[t].get<std::vector<double>>();
                tr.s_next = states[t + 1].get<std::vector<double>>();
                tr.done = (t + 1 == actions.size());
                traj.steps.push_back(std::move(tr));
            }
            traj.validate(spec);
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const InvalidInputError& e) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const SchemaError& e) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        out.push_back(std::move(traj));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Uniform ring replay buffer. Flat storage grows on demand up to capacity,
// then overwrites the oldest entries (strict FIFO).

class ReplayBuffer {
  public:
    ReplayBuffer(int state_dim, int action_dim, long capacity)
        : state_dim_(state_dim), action_dim_(action_dim), capacity_(capacity) {
        if (state_dim <= 0 || action_dim <= 0 || capacity <= 0)
            throw InvalidInputError("ReplayBuffer: dims and capacity must be positive");
    }

    long size() const { return size_; }
    long capacity() const { return capacity_; }

    void push(std::span<const double> s, std::span<const double> a, std::span<const double> s_next,
              bool done) {
        if (static_cast<int>(s.size()) != state_dim_ || static_cast<int>(s_next.size()) != state_dim_ ||
            static_cast<int>(a.size()) != action_dim_)
            throw InvalidInputError("ReplayBuffer::push: transition dims do not match buffer");
        if (size_ < capacity_) {
            s_.insert(s_.end(), s.begin(), s.end());
            a_.insert(a_.end(), a.begin(), a.end());
            sn_.insert(sn_.end(), s_next.begin(), s_next.end());
            done_.push_back(done ? 1 : 0);
            ++size_;
        } else {
            const long i = next_overwrite_;
            std::copy(s.begin(), s.end(), s_.begin() + i * state_dim_);
            std::copy(a.begin(), a.end(), a_.begin() + i * action_dim_);
            std::copy(s_next.begin(), s_next.end(), sn_.begin() + i * state_dim_);
            done_[i] = done ? 1 : 0;
            next_overwrite_ = (next_overwrite_ + 1) % capacity_;
        }
    }

    TransitionView at(long i) const {
        // logical index 0 = oldest entry
        const long phys = size_ < capacity_ ? i : (next_overwrite_ + i) % capacity_;
        return {{s_.data() + phys * state_dim_, static_cast<size_t>(state_dim_)},
                {a_.data() + phys * action_dim_, static_cast<size_t>(action_dim_)},
                {sn_.data() + phys * state_dim_, static_cast<size_t>(state_dim_)},
                done_[phys] != 0};
    }

    // Uniform with replacement.
    std::vector<TransitionView> sample(int n, Rng& rng) const {
        if (size_ == 0) throw InvalidInputError("ReplayBuffer::sample: buffer is empty");
        if (n > size_) throw InvalidInputError("ReplayBuffer::sample: n exceeds buffer size");
        std::vector<TransitionView> out;
        out.reserve(n);
        for (int k = 0; k < n; ++k) out.push_back(at(static_cast<long>(rng.below(size_))));
        return out;
    }

  private:
    int state_dim_, action_dim_;
    long capacity_;
    long size_ = 0;
    long next_overwrite_ = 0;
    std::vector<double> s_, a_, sn_;
    std::vector<uint8_t> done_;
};

// ---------------------------------------------------------------------------
// Expert demonstrations with uniform access to trajectories, state-action
// pairs, and raw transitions.

class ExpertDataset {
  public:
    ExpertDataset() = default;
    explicit ExpertDataset(std::vector<Trajectory> trajs) : trajs_(std::move(trajs)) {
        for (int i = 0; i < static_cast<int>(trajs_.size()); ++i)
            for (int t = 0; t < trajs_[i].length(); ++t) pairs_.emplace_back(i, t);
    }

    static ExpertDataset load(const std::string& path) { return ExpertDataset(load_trajectories(path)); }

    bool empty() const { return trajs_.empty(); }
    int num_trajectories() const { return static_cast<int>(trajs_.size()); }
    long num_pairs() const { return static_cast<long>(pairs_.size()); }
    const Trajectory& trajectory(int i) const { return trajs_[i]; }
    const std::vector<Trajectory>& trajectories() const { return trajs_; }

    int sample_trajectory_index(Rng& rng) const {
        require_nonempty();
        return static_cast<int>(rng.below(trajs_.size()));
    }

    // Batch of (s, a) pairs, uniform over all pairs, with replacement.
    void sample_pairs(int n, Rng& rng, nn::MatD& states, nn::MatD& actions) const {
        require_nonempty();
        const int sd = static_cast<int>(trajs_[0].steps[0].s.size());
        const int ad = static_cast<int>(trajs_[0].steps[0].a.size());
        states = nn::MatD(n, sd);
        actions = nn::MatD(n, ad);
        for (int k = 0; k < n; ++k) {
            const auto [ti, t] = pairs_[rng.below(pairs_.size())];
            const Transition& tr = trajs_[ti].steps[t];
            std::copy(tr.s.begin(), tr.s.end(), states.row(k).begin());
            std::copy(tr.a.begin(), tr.a.end(), actions.row(k).begin());
        }
    }

    TransitionView sample_transition(Rng& rng) const {
        require_nonempty();
        const auto [ti, t] = pairs_[rng.below(pairs_.size())];
        const Transition& tr = trajs_[ti].steps[t];
        return {tr.s, tr.a, tr.s_next, tr.done};
    }

  private:
    void require_nonempty() const {
        if (trajs_.empty()) throw InvalidInputError("ExpertDataset: dataset is empty");
    }

    std::vector<Trajectory> trajs_;
    std::vector<std::pair<int, int>> pairs_;
};

}  // namespace csirl::data
