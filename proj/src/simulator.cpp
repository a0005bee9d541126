#include "corrsched/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "corrsched/errors.hpp"

namespace corrsched {

namespace {

constexpr std::size_t kReductionChunks = 16;

void check_phases(const std::vector<Phase>& phases, std::size_t horizon, const IndexSpace& events) {
    if (phases.empty()) return;
    std::uint64_t expect = 0;
    for (const auto& ph : phases) {
        if (ph.start != expect || ph.end <= ph.start) {
            throw std::invalid_argument("phase schedule must cover consecutive, non-empty slot ranges starting at 0");
        }
        const auto v = ph.distribution.violations(events);
        if (!v.empty()) throw SpecError("phase [" + std::to_string(ph.start) + ", " + std::to_string(ph.end) + "): " + v.front());
        expect = ph.end;
    }
    if (expect != horizon) {
        throw std::invalid_argument("phase schedule ends at slot " + std::to_string(expect) + " but the horizon is " +
                                    std::to_string(horizon));
    }
}

}  // namespace

nlohmann::json sim_config_to_json(const SimConfig& config) {
    return {{"V", config.dpp.V},
            {"delay", config.dpp.D},
            {"mode", to_string(config.dpp.mode)},
            {"window", config.dpp.W},
            {"slots", config.horizon},
            {"seed", config.seed},
            {"runs", config.runs},
            {"trace_stride", config.trace_stride},
            {"prune", config.prune == PruneMode::Auto ? "auto" : config.prune == PruneMode::Off ? "off" : "force"}};
}

SimConfig sim_config_from_json(const nlohmann::json& j) {
    SimConfig c;
    c.dpp.V = j.at("V").get<double>();
    c.dpp.D = j.at("delay").get<std::size_t>();
    c.dpp.mode = parse_dpp_mode(j.value("mode", std::string("exact")));
    c.dpp.W = j.value("window", std::size_t{40});
    c.horizon = j.at("slots").get<std::size_t>();
    c.seed = j.value("seed", std::uint64_t{0});
    c.runs = j.value("runs", std::size_t{1});
    c.trace_stride = j.value("trace_stride", std::size_t{100});
    const std::string prune = j.value("prune", std::string("auto"));
    if (prune == "auto") c.prune = PruneMode::Auto;
    else if (prune == "off") c.prune = PruneMode::Off;
    else if (prune == "force") c.prune = PruneMode::Force;
    else throw std::invalid_argument("unknown prune mode '" + prune + "'");
    return c;
}

nlohmann::json metrics_to_json(const Metrics& m) {
    nlohmann::json series = nlohmann::json::array();
    for (const auto& [t, v] : m.max_pbar_series) series.push_back({t, v});
    return {{"slots", m.slots},
            {"ubar", m.ubar},
            {"pbar", m.pbar},
            {"final_q", m.final_q},
            {"queue_identity_residual", m.queue_identity_residual},
            {"strategy_count", m.strategy_count},
            {"max_pbar_series", series}};
}

Simulation::Simulation(const ProblemSpec& spec, SimConfig config)
    : spec_(&spec), config_(std::move(config)), table_(spec) {
    if (config_.horizon == 0) throw std::invalid_argument("simulation horizon must be positive");
    if (config_.runs == 0) throw std::invalid_argument("ensemble size must be at least 1");
    if (config_.trace_stride == 0) throw std::invalid_argument("trace stride must be at least 1");
    if (!(config_.dpp.V >= 0.0)) throw std::invalid_argument("V must be non-negative");
    if (config_.dpp.mode == DppMode::Approximate && config_.dpp.W == 0) {
        throw std::invalid_argument("window must be at least 1 in approximate mode");
    }
    check_phases(config_.phases, config_.horizon, spec.events);

    if (config_.dpp.mode == DppMode::Separable) {
        separable_.emplace(spec);
        return;
    }
    strategies_ = candidate_strategies(spec, config_.prune);
    set_.emplace(spec, strategies_);
    if (config_.dpp.mode == DppMode::Exact) {
        const auto r = compute_r_vectors(spec, *set_);
        exact_r_.reserve(r.size() * table_.width());
        for (const auto& v : r) exact_r_.insert(exact_r_.end(), v.values.begin(), v.values.end());
    }
}

const EventDistribution& Simulation::distribution_at(std::uint64_t t, std::size_t& hint) const {
    if (config_.phases.empty()) return spec_->distribution;
    while (t >= config_.phases[hint].end) ++hint;
    return config_.phases[hint].distribution;
}

std::int64_t Simulation::separable_rank(std::span<const double> q) const {
    PureStrategy s;
    for (std::size_t i = 0; i < spec_->users(); ++i) {
        std::vector<int> map(static_cast<std::size_t>(spec_->events.size(i)));
        for (std::size_t w = 0; w < map.size(); ++w) {
            map[w] = separable_->select_user(i, q, config_.dpp.V, static_cast<int>(w));
        }
        s.maps.push_back(std::move(map));
    }
    const auto rank = strategy_rank(*spec_, s);
    return rank ? static_cast<std::int64_t>(*rank) : -1;
}

// Sink interface:
//   bool wants_strategy(t)
//   void slot(t, strategy, penalties, q_before)
//   void applied(t_next, delayed, q_after)
template <class Sink>
void Simulation::simulate(std::uint64_t seed, Sink& sink) const {
    const ProblemSpec& spec = *spec_;
    const std::size_t n = spec.users();
    const std::size_t K = spec.num_constraints();
    const std::size_t D = config_.dpp.D;
    const double V = config_.dpp.V;
    const std::span<const double> c(spec.constraints);

    Rng rng(seed);
    QueueState queue(K, D);
    std::optional<RollingEstimator> estimator;
    if (config_.dpp.mode == DppMode::Approximate) estimator.emplace(spec, table_, *set_, config_.dpp.W);

    std::vector<int> history((D + 1) * n, 0);  // events of the last D + 1 slots
    std::vector<int> omega(n);
    std::vector<int> alpha(n);
    std::vector<double> p(K + 1);
    std::size_t hint = 0;

    for (std::uint64_t t = 0; t < config_.horizon; ++t) {
        const std::size_t wf = distribution_at(t, hint).sample(spec.events, rng, omega);
        std::int64_t chosen = -1;
        std::size_t af = 0;
        switch (config_.dpp.mode) {
            case DppMode::Exact:
                chosen = static_cast<std::int64_t>(dpp_select(exact_r_.data(), set_->size(), K + 1, queue.q(), V));
                af = set_->action_index(static_cast<std::size_t>(chosen), omega);
                break;
            case DppMode::Approximate:
                chosen = static_cast<std::int64_t>(estimator->select(queue.q(), V));
                af = set_->action_index(static_cast<std::size_t>(chosen), omega);
                break;
            case DppMode::Separable:
                alpha = separable_->select(queue.q(), V, omega);
                af = spec.actions.encode(alpha);
                if (sink.wants_strategy(t)) chosen = separable_rank(queue.q());
                break;
        }
        table_.penalties(wf, af, p);
        sink.slot(t, chosen, p, queue.q());
        const auto delayed = queue.advance(std::span<const double>(p).subspan(1), c);
        sink.applied(t + 1, delayed, queue.q());

        if (estimator) {
            std::copy(omega.begin(), omega.end(), history.begin() + static_cast<std::ptrdiff_t>((t % (D + 1)) * n));
            // omega(t - D) is revealed at the end of slot t and first used at slot t + 1.
            if (t >= D) {
                const std::size_t slot = (t - D) % (D + 1);
                estimator->push(std::span<const int>(history.data() + slot * n, n));
            }
        }
    }
}

namespace {

// Tracks the queue-bound residual S_k(t)/t - c_k - Q_k(t)/t.
struct IdentityTracker {
    std::vector<double> applied_sum;
    std::span<const double> c;
    double worst = -std::numeric_limits<double>::infinity();

    explicit IdentityTracker(std::span<const double> constraints)
        : applied_sum(constraints.size(), 0.0), c(constraints) {}

    void update(std::uint64_t t, std::span<const double> delayed, std::span<const double> q) {
        const double td = static_cast<double>(t);
        for (std::size_t k = 0; k < c.size(); ++k) {
            applied_sum[k] += delayed[k];
            worst = std::max(worst, applied_sum[k] / td - c[k] - q[k] / td);
        }
    }
    // Violation of sum(applied)/t - c <= Q(t)/t, clamped at zero when the bound holds with slack.
    double value() const { return c.empty() ? 0.0 : std::max(0.0, worst); }
};

struct EpisodeSink {
    std::size_t stride;
    std::uint64_t horizon;
    bool record;
    double sum_u = 0.0;
    std::vector<double> sum_p;
    IdentityTracker identity;
    Metrics metrics;
    Trace trace;

    EpisodeSink(std::size_t K, std::size_t stride_, std::uint64_t horizon_, bool record_, std::span<const double> c)
        : stride(stride_), horizon(horizon_), record(record_), sum_p(K, 0.0), identity(c) {
        trace.num_constraints = K;
    }

    bool recorded(std::uint64_t t) const { return t % stride == 0 || t + 1 == horizon; }
    bool wants_strategy(std::uint64_t t) const { return record && recorded(t); }

    void slot(std::uint64_t t, std::int64_t strategy, std::span<const double> p, std::span<const double> q) {
        sum_u += -p[0];
        for (std::size_t k = 0; k < sum_p.size(); ++k) sum_p[k] += p[k + 1];
        if (!recorded(t)) return;
        const double n = static_cast<double>(t + 1);
        double max_pbar = -std::numeric_limits<double>::infinity();
        std::vector<double> pbar(sum_p.size());
        for (std::size_t k = 0; k < sum_p.size(); ++k) {
            pbar[k] = sum_p[k] / n;
            max_pbar = std::max(max_pbar, pbar[k]);
        }
        metrics.max_pbar_series.emplace_back(t, sum_p.empty() ? 0.0 : max_pbar);
        if (!record) return;
        TraceRecord row;
        row.t = t;
        row.strategy = strategy;
        row.u = -p[0];
        row.p.assign(p.begin() + 1, p.end());
        row.q.assign(q.begin(), q.end());
        row.ubar = sum_u / n;
        row.pbar = std::move(pbar);
        trace.rows.push_back(std::move(row));
    }

    void applied(std::uint64_t t_next, std::span<const double> delayed, std::span<const double> q) {
        identity.update(t_next, delayed, q);
        if (t_next == horizon) metrics.final_q.assign(q.begin(), q.end());
    }
};

// Accumulates one reduction chunk of an ensemble.
struct EnsembleSink {
    std::vector<double>* u;
    std::vector<std::vector<double>>* p;
    std::vector<double>* q_norm;
    std::vector<double>* blocks;
    std::size_t block;
    IdentityTracker identity;
    double sum_u = 0.0;

    bool wants_strategy(std::uint64_t) const { return false; }

    void slot(std::uint64_t t, std::int64_t, std::span<const double> pen, std::span<const double>) {
        (*u)[t] += -pen[0];
        sum_u += -pen[0];
        for (std::size_t k = 0; k + 1 < pen.size(); ++k) (*p)[k][t] += pen[k + 1];
        (*blocks)[t / block] += -pen[0];
    }

    void applied(std::uint64_t t_next, std::span<const double> delayed, std::span<const double> q) {
        identity.update(t_next, delayed, q);
        double sq = 0.0;
        for (double v : q) sq += v * v;
        (*q_norm)[t_next] += std::sqrt(sq);
    }
};

}  // namespace

EpisodeResult Simulation::run(std::uint64_t seed, bool record_trace) const {
    const std::size_t K = spec_->num_constraints();
    EpisodeSink sink(K, config_.trace_stride, config_.horizon, record_trace, spec_->constraints);
    simulate(seed, sink);

    const double n = static_cast<double>(config_.horizon);
    sink.metrics.slots = config_.horizon;
    sink.metrics.ubar = sink.sum_u / n;
    sink.metrics.pbar.resize(K);
    for (std::size_t k = 0; k < K; ++k) sink.metrics.pbar[k] = sink.sum_p[k] / n;
    sink.metrics.queue_identity_residual = sink.identity.value();
    sink.metrics.strategy_count = strategies_.size();
    return {std::move(sink.metrics), std::move(sink.trace)};
}

EnsembleResult Simulation::run_ensemble(unsigned threads) const {
    const std::size_t K = spec_->num_constraints();
    const std::size_t T = config_.horizon;
    const std::size_t R = config_.runs;
    const std::size_t block = config_.trace_stride;
    const std::size_t n_blocks = (T + block - 1) / block;

    struct Chunk {
        std::vector<double> u;
        std::vector<std::vector<double>> p;
        std::vector<double> q_norm;
        double residual = -std::numeric_limits<double>::infinity();
    };
    std::vector<Chunk> chunks(std::min(kReductionChunks, R));
    EnsembleResult out;
    out.runs = R;
    out.block = block;
    out.block_u.assign(R, std::vector<double>(n_blocks, 0.0));
    out.final_ubar.assign(R, 0.0);

    auto run_chunk = [&](std::size_t ci) {
        Chunk& ch = chunks[ci];
        ch.u.assign(T, 0.0);
        ch.p.assign(K, std::vector<double>(T, 0.0));
        ch.q_norm.assign(T + 1, 0.0);
        const std::size_t first = ci * R / chunks.size();
        const std::size_t last = (ci + 1) * R / chunks.size();
        for (std::size_t run = first; run < last; ++run) {
            EnsembleSink sink{&ch.u, &ch.p, &ch.q_norm, &out.block_u[run], block, IdentityTracker(spec_->constraints)};
            simulate(config_.seed + run, sink);
            ch.residual = std::max(ch.residual, sink.identity.value());
            out.final_ubar[run] = sink.sum_u / static_cast<double>(T);
            for (std::size_t b = 0; b < n_blocks; ++b) {
                const std::size_t len = std::min(block, T - b * block);
                out.block_u[run][b] /= static_cast<double>(len);
            }
        }
    };

    unsigned n_threads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, chunks.size()));
    if (n_threads <= 1) {
        for (std::size_t ci = 0; ci < chunks.size(); ++ci) run_chunk(ci);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(n_threads);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t ci; (ci = next.fetch_add(1)) < chunks.size();) run_chunk(ci);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    // Fixed-order reduction over chunks.
    out.mean_u.assign(T, 0.0);
    out.mean_p.assign(K, std::vector<double>(T, 0.0));
    out.mean_q_norm.assign(T + 1, 0.0);
    out.queue_identity_residual = K == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    for (const auto& ch : chunks) {
        for (std::size_t t = 0; t < T; ++t) out.mean_u[t] += ch.u[t];
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t t = 0; t < T; ++t) out.mean_p[k][t] += ch.p[k][t];
        }
        for (std::size_t t = 0; t <= T; ++t) out.mean_q_norm[t] += ch.q_norm[t];
        if (K > 0) out.queue_identity_residual = std::max(out.queue_identity_residual, ch.residual);
    }
    const double inv = 1.0 / static_cast<double>(R);
    for (auto& v : out.mean_u) v *= inv;
    for (auto& row : out.mean_p) {
        for (auto& v : row) v *= inv;
    }
    for (auto& v : out.mean_q_norm) v *= inv;
    return out;
}

EpisodeResult run_episode(const ProblemSpec& spec, const SimConfig& config) {
    return Simulation(spec, config).run();
}

EnsembleResult run_ensemble(const ProblemSpec& spec, const SimConfig& config, unsigned threads) {
    return Simulation(spec, config).run_ensemble(threads);
}

}  // namespace corrsched
