#include "lapwave/distsim.hpp"

#include <cassert>
#include <string>
#include <utility>

#include "lapwave/rng.hpp"
#include "run_internal.hpp"

namespace lapwave::distsim {

namespace {

// One logical process per graph node. All protocol state lives here; the
// accessors enforce the locality contract when checking is enabled: a node's
// state may only be touched while that node is the scheduled one. The
// scheduler itself (transport and observer) is exempt, it models the network
// and the external measurement, not another node.
class NodeProcess {
public:
    NodeProcess(int id, int degree, const bool* checking, const int* active)
        : id_(id), inbox_(degree), filled_(degree, 0),
          checking_(checking), active_(active) {}

    int id() const { return id_; }

    double x() const { guard(); return x_; }
    double y() const { guard(); return y_; }
    double dy() const { guard(); return dy_; }
    void set_x(double v) { guard(); x_ = v; }
    void set_y(double v) { guard(); y_ = v; }
    void set_dy(double v) { guard(); dy_ = v; }

    // diffusion: queue one payload per neighbor, reading only local state
    void send(int dest, double payload) {
        guard();
        outbox_.emplace_back(dest, payload);
    }

    // fusion: ascending-slot accumulation; slots are ordered by sender id,
    // matching the centralized matvec's ascending-neighbor order
    double fuse(long long round) {
        guard();
        double acc = 0.0;
        for (std::size_t k = 0; k < inbox_.size(); ++k) {
            if (!filled_[k])
                throw ProtocolError("node " + std::to_string(id_) +
                                    " missing message in slot " + std::to_string(k) +
                                    " at round " + std::to_string(round));
            acc += inbox_[k];
            filled_[k] = 0;
        }
        return acc;
    }

private:
    friend class Simulator; // transport delivery and observer readout

    void guard() const {
        if (*checking_ && *active_ != id_)
            throw ProtocolError("locality violation: scheduled node " +
                                std::to_string(*active_) + " touched state of node " +
                                std::to_string(id_));
    }

    int id_;
    double x_ = 0.0, y_ = 0.0, dy_ = 0.0;
    std::vector<double> inbox_;
    std::vector<unsigned char> filled_;
    std::vector<std::pair<int, double>> outbox_;
    const bool* checking_;
    const int* active_;
};

class Simulator {
public:
    Simulator(const Graph& g, const RunConfig& config, const SimOptions& opts)
        : g_(g), config_(config), opts_(opts), checking_(opts.locality_check),
          sched_rng_(opts.schedule_seed), order_(g.n()) {
        nodes_.reserve(g.n());
        for (int u = 0; u < g.n(); ++u)
            nodes_.emplace_back(u, g.degree(u), &checking_, &active_);
        // inbox slot of sender u at the receiver = position of u in the
        // receiver's ascending neighbor list
        slot_.resize(g.n());
        for (int u = 0; u < g.n(); ++u) {
            auto nb = g.neighbors(u);
            slot_[u].resize(nb.size());
            for (std::size_t k = 0; k < nb.size(); ++k) {
                auto rnb = g.neighbors(nb[k]);
                slot_[u][k] = static_cast<int>(
                    std::lower_bound(rnb.begin(), rnb.end(), u) - rnb.begin());
            }
        }
        for (int u = 0; u < g.n(); ++u)
            order_[u] = u;
    }

    SimResult run_si2(const StatePair& state) {
        detail::validate_config(g_, config_, Scheme::SI2);
        reject_energy_recording();
        const double eps = config_.eps;
        const double halfeps = 0.5 * eps;
        SimResult res;
        detail::Recorder rec(g_, config_, false);
        load_state(state);
        maybe_violate();
        observe(rec, 0);

        // init round, one cycle: delta_y = -L x_0
        begin_round(0);
        cycle([](NodeProcess& n) { return n.x(); },
              [](NodeProcess& n, double lx) { n.set_dy(-lx); });
        end_round(res);

        for (long long i = 1; i < config_.samples; ++i) {
            begin_round(i);
            barrier(); // iteration start
            // local half-kick y_{i-1/2} = y_{i-1} - (eps/2) delta_y
            local([&](NodeProcess& n) { n.set_y(n.y() + (-halfeps) * n.dy()); });
            // cycle 1: diffuse y_{i-1/2}, fuse to L y_{i-1/2}, drift x
            cycle([](NodeProcess& n) { return n.y(); },
                  [&](NodeProcess& n, double ly) { n.set_x(n.x() + (-eps) * ly); });
            // cycle 2: diffuse x_i, fuse to L x_i, refresh delta_y, half-kick
            cycle([](NodeProcess& n) { return n.x(); },
                  [&](NodeProcess& n, double lx) {
                      n.set_dy(-lx);
                      n.set_y(n.y() + (-halfeps) * n.dy());
                  });
            end_round(res);
            observe(rec, i);
        }
        finish(res, rec);
        return res;
    }

    SimResult run_leapfrog2(const StatePair& state) {
        detail::validate_config(g_, config_, Scheme::Leapfrog2);
        reject_energy_recording();
        const double eps = config_.eps;
        const double halfeps = 0.5 * eps;
        SimResult res;
        detail::Recorder rec(g_, config_, false);
        load_state(state); // y holds the momentum p
        maybe_violate();
        observe(rec, 0, /*hide_y=*/true);

        // init round: half-step momentum p_{1/2} = p_0 + (eps/2)(-L x_0)
        begin_round(0);
        cycle([](NodeProcess& n) { return n.x(); },
              [&](NodeProcess& n, double lx) { n.set_y(n.y() + (-halfeps) * lx); });
        end_round(res);

        for (long long i = 1; i < config_.samples; ++i) {
            begin_round(i);
            barrier(); // iteration start
            local([&](NodeProcess& n) { n.set_x(n.x() + eps * n.y()); });
            cycle([](NodeProcess& n) { return n.x(); },
                  [&](NodeProcess& n, double lx) { n.set_y(n.y() + (-eps) * lx); });
            end_round(res);
            observe(rec, i, /*hide_y=*/true);
        }
        finish(res, rec);
        return res;
    }

private:
    void reject_energy_recording() const {
        if (config_.record_energy)
            throw ConfigError("energy recording would need a global reduction; "
                              "not available in the distributed simulator");
    }

    void load_state(const StatePair& state) {
        if (static_cast<int>(state.x.size()) != g_.n() ||
            static_cast<int>(state.y.size()) != g_.n())
            throw ConfigError("state size does not match graph");
        for (int u = 0; u < g_.n(); ++u) {
            nodes_[u].x_ = state.x[u];
            nodes_[u].y_ = state.y[u];
        }
    }

    // deliberate out-of-turn access, used by tests to prove the checker trips
    void maybe_violate() {
        if (!opts_.inject_locality_violation || g_.n() < 2)
            return;
        active_ = 0;
        (void)nodes_[1].x();
        active_ = -1;
    }

    // fresh execution order per phase; must not influence any output
    void shuffle_order() {
        if (opts_.schedule_seed == 0)
            return;
        for (int i = g_.n() - 1; i > 0; --i) {
            const int j = static_cast<int>(sched_rng_.below(i + 1));
            std::swap(order_[i], order_[j]);
        }
    }

    template <typename F> void local(F&& f) {
        shuffle_order();
        for (int u : order_) {
            active_ = u;
            f(nodes_[u]);
        }
        active_ = -1;
    }

    // one diffusion-fusion cycle: every node broadcasts payload_of(self) to
    // its neighbors; after delivery and the cycle barrier, every node fuses
    // its inbox into the matrix row deg*own - sum (Laplacian) or sum
    // (adjacency) and applies on_row.
    template <typename P, typename F> void cycle(P&& payload_of, F&& on_row) {
        shuffle_order();
        for (int u : order_) {
            active_ = u;
            NodeProcess& n = nodes_[u];
            const double payload = payload_of(n);
            for (int v : g_.neighbors(u))
                n.send(v, payload);
        }
        active_ = -1;
        deliver();
        ++global_cycle_;
        barrier(); // all messages in before any fusion
        shuffle_order();
        for (int u : order_) {
            active_ = u;
            NodeProcess& n = nodes_[u];
            const double acc = n.fuse(round_);
            const double row = config_.matrix == MatrixKind::Laplacian
                                   ? static_cast<double>(g_.degree(u)) * payload_of(n) - acc
                                   : acc;
            on_row(n, row);
        }
        active_ = -1;
    }

    // transport: drain outboxes into receiver inbox slots
    void deliver() {
        for (int u = 0; u < g_.n(); ++u) {
            NodeProcess& n = nodes_[u];
            auto nb = g_.neighbors(u);
            for (std::size_t k = 0; k < n.outbox_.size(); ++k) {
                auto [dest, payload] = n.outbox_[k];
                assert(k < nb.size() && nb[k] == dest);
                (void)nb;
                ++messages_this_round_;
                if (u == opts_.drop_sender && dest == opts_.drop_receiver &&
                    global_cycle_ == opts_.drop_cycle)
                    continue; // injected fault: payload lost in transit
                NodeProcess& r = nodes_[dest];
                r.inbox_[slot_[u][k]] = payload;
                r.filled_[slot_[u][k]] = 1;
            }
            n.outbox_.clear();
        }
    }

    void barrier() { ++barriers_this_round_; }

    void begin_round(long long round) {
        round_ = round;
        messages_this_round_ = 0;
        barriers_this_round_ = 0;
    }

    void end_round(SimResult& res) {
        RoundStats rs;
        rs.iteration = round_;
        rs.messages_directed = messages_this_round_;
        rs.packets = messages_this_round_ / 2;
        rs.barriers = barriers_this_round_;
        res.total_messages_directed += rs.messages_directed;
        res.total_packets += rs.packets;
        res.total_barriers += rs.barriers;
        rs.cum_messages_directed = res.total_messages_directed;
        rs.cum_packets = res.total_packets;
        rs.cum_barriers = res.total_barriers;
        res.rounds.push_back(rs);
    }

    // external measurement, not part of the protocol. The Lagrangian scheme
    // keeps its momentum out of the record, matching the centralized run.
    void observe(detail::Recorder& rec, long long l, bool hide_y = false) {
        scratch_x_.resize(g_.n());
        scratch_y_.resize(g_.n());
        for (int u = 0; u < g_.n(); ++u) {
            scratch_x_[u] = nodes_[u].x_;
            scratch_y_[u] = hide_y ? 0.0 : nodes_[u].y_;
        }
        rec.sample(l, scratch_x_, scratch_y_);
    }

    void finish(SimResult& res, detail::Recorder& rec) {
        res.trajectory = rec.take();
        res.global_reductions = 0; // the protocol performs none
    }

    const Graph& g_;
    RunConfig config_;
    SimOptions opts_;
    bool checking_;
    int active_ = -1;
    Rng sched_rng_;
    std::vector<int> order_;
    std::vector<NodeProcess> nodes_;
    std::vector<std::vector<int>> slot_;
    std::vector<double> scratch_x_, scratch_y_;
    long long round_ = 0;
    long long messages_this_round_ = 0;
    int barriers_this_round_ = 0;
    long long global_cycle_ = 0;
};

} // namespace

SimResult run_distributed_si2(const Graph& g, const RunConfig& config,
                              const StatePair& state, const SimOptions& opts) {
    Simulator sim(g, config, opts);
    return sim.run_si2(state);
}

SimResult run_distributed_leapfrog2(const Graph& g, const RunConfig& config,
                                    const StatePair& state, const SimOptions& opts) {
    Simulator sim(g, config, opts);
    return sim.run_leapfrog2(state);
}

} // namespace lapwave::distsim
