#include "corrsched/spec_io.hpp"

#include <fstream>
#include <sstream>

#include "corrsched/errors.hpp"

namespace corrsched {

using nlohmann::json;

namespace {

std::vector<double> real_vector(const json& j) {
    std::vector<double> out;
    for (const auto& x : j) out.push_back(parse_real(x));
    return out;
}

std::vector<std::vector<double>> real_matrix(const json& j) {
    std::vector<std::vector<double>> out;
    for (const auto& row : j) out.push_back(real_vector(row));
    return out;
}

EventDistribution distribution_from_json(const json& j, const IndexSpace& events, bool zero_marginals_ok) {
    if (j.contains("joint")) return EventDistribution::joint(real_vector(j.at("joint")));
    if (j.contains("product")) {
        auto d = EventDistribution::product(real_matrix(j.at("product")));
        if (!zero_marginals_ok) return d;
        // Structural checks first so as_joint never reads out of range.
        for (const auto& m : d.violations(events)) {
            if (m.find("zero marginal") == std::string::npos) throw SpecError("phase distribution: " + m);
        }
        return d.as_joint(events);
    }
    throw SpecError("distribution: expected a 'joint' or 'product' entry");
}

json distribution_to_json(const EventDistribution& d) {
    if (d.mode() == EventDistribution::Mode::Joint) return json{{"joint", d.joint_table()}};
    return json{{"product", d.marginals()}};
}

PenaltyFn penalty_from_json(const json& j, const IndexSpace& actions, const IndexSpace& events) {
    const std::string kind = j.at("kind").get<std::string>();
    const json params = j.value("params", json::object());
    if (kind == "full_table") {
        return FullTable{actions, events, real_vector(params.at("values"))};
    }
    if (kind == "power") return PowerPerUser{params.at("user").get<int>()};
    if (kind == "min_sum_utility_neg") {
        return MinSumUtilityNeg{parse_real(params.at("cap")), real_matrix(params.at("weights"))};
    }
    if (kind == "collision_utility_neg") return CollisionUtilityNeg{};
    if (kind == "weighted_sum") {
        WeightedSum w;
        for (const auto& term : params.at("terms")) {
            w.weights.push_back(parse_real(term.at("weight")));
            w.children.push_back(penalty_from_json(term.at("penalty"), actions, events));
        }
        return w;
    }
    if (kind == "product_form") {
        return ProductForm{real_matrix(params.at("event_factors")), real_matrix(params.at("action_factors"))};
    }
    if (kind == "separable_sum") {
        SeparableSum s;
        for (const auto& user : params.at("tables")) s.tables.push_back(real_matrix(user));
        return s;
    }
    throw SpecError("penalty: unknown kind '" + kind + "'");
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json penalty_to_json(const PenaltyFn& fn) {
    json params = std::visit(
        overloaded{
            [](const FullTable& t) { return json{{"values", t.values}}; },
            [](const PowerPerUser& p) { return json{{"user", p.user}}; },
            [](const MinSumUtilityNeg& m) { return json{{"cap", m.cap}, {"weights", m.weights}}; },
            [](const CollisionUtilityNeg&) { return json::object(); },
            [](const WeightedSum& w) {
                json terms = json::array();
                for (std::size_t r = 0; r < w.children.size(); ++r) {
                    terms.push_back({{"weight", w.weights[r]}, {"penalty", penalty_to_json(w.children[r])}});
                }
                return json{{"terms", terms}};
            },
            [](const ProductForm& p) {
                return json{{"event_factors", p.event_factors}, {"action_factors", p.action_factors}};
            },
            [](const SeparableSum& s) { return json{{"tables", s.tables}}; },
        },
        fn.node());
    return json{{"kind", fn.kind()}, {"params", params}};
}

}  // namespace

double parse_real(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) throw SpecError("expected a number, got " + j.dump());
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return std::stod(s);
        const double num = std::stod(s.substr(0, slash));
        const double den = std::stod(s.substr(slash + 1));
        if (den == 0.0) throw SpecError("zero denominator in '" + s + "'");
        return num / den;
    } catch (const std::logic_error&) {
        throw SpecError("cannot parse number '" + s + "'");
    }
}

ProblemSpec spec_from_json(const json& j) {
    try {
        ProblemSpec spec;
        const auto n = j.at("users").get<std::size_t>();
        auto action_sizes = j.at("action_sizes").get<std::vector<int>>();
        auto event_sizes = j.at("event_sizes").get<std::vector<int>>();
        if (action_sizes.size() != n || event_sizes.size() != n) {
            throw SpecError("size mismatch: users=" + std::to_string(n) +
                            " but action_sizes/event_sizes have other lengths");
        }
        spec.actions = IndexSpace(std::move(action_sizes));
        spec.events = IndexSpace(std::move(event_sizes));
        spec.distribution = distribution_from_json(j.at("distribution"), spec.events, false);
        for (const auto& p : j.at("penalties")) {
            spec.penalties.push_back(penalty_from_json(p, spec.actions, spec.events));
        }
        spec.constraints = real_vector(j.value("constraints", json::array()));
        const std::string filter = j.value("strategy_filter", std::string("none"));
        if (filter == "idle_on_zero_event") {
            spec.strategy_filter = StrategyFilter::IdleOnZeroEvent;
        } else if (filter != "none") {
            throw SpecError("strategy_filter: unknown value '" + filter + "'");
        }
        return spec;
    } catch (const json::exception& e) {
        throw SpecError(std::string("malformed problem spec: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw SpecError(std::string("malformed problem spec: ") + e.what());
    }
}

json spec_to_json(const ProblemSpec& spec) {
    json penalties = json::array();
    for (const auto& p : spec.penalties) penalties.push_back(penalty_to_json(p));
    json j{{"users", spec.users()},
           {"action_sizes", spec.actions.sizes()},
           {"event_sizes", spec.events.sizes()},
           {"distribution", distribution_to_json(spec.distribution)},
           {"penalties", penalties},
           {"constraints", spec.constraints}};
    if (spec.strategy_filter == StrategyFilter::IdleOnZeroEvent) j["strategy_filter"] = "idle_on_zero_event";
    return j;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
        throw SpecError("'" + path.string() + "': " + e.what());
    }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

ProblemSpec load_spec(const std::filesystem::path& path) {
    ProblemSpec spec;
    try {
        spec = spec_from_json(read_json_file(path));
    } catch (const SpecError& e) {
        throw SpecError("'" + path.string() + "': " + e.what());
    }
    const auto report = validate_spec(spec);
    if (!report.ok()) {
        std::ostringstream os;
        os << "'" << path.string() << "' failed validation:";
        for (const auto& v : report.violations) os << "\n  - " << v;
        throw SpecError(os.str());
    }
    return spec;
}

void save_spec(const ProblemSpec& spec, const std::filesystem::path& path) {
    write_json_file(spec_to_json(spec), path);
}

std::vector<Phase> phases_from_json(const json& j, const IndexSpace& events) {
    std::vector<Phase> phases;
    try {
        for (const auto& p : j.at("phases")) {
            Phase ph;
            ph.start = p.at("start").get<std::uint64_t>();
            ph.end = p.at("end").get<std::uint64_t>();
            ph.distribution = distribution_from_json(p.at("distribution"), events, true);
            for (const auto& v : ph.distribution.violations(events)) throw SpecError("phase distribution: " + v);
            phases.push_back(std::move(ph));
        }
    } catch (const json::exception& e) {
        throw SpecError(std::string("malformed phase file: ") + e.what());
    }
    return phases;
}

std::vector<Phase> load_phases(const std::filesystem::path& path, const IndexSpace& events) {
    return phases_from_json(read_json_file(path), events);
}

}  // namespace corrsched
