#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "corrsched/simulator.hpp"

namespace corrsched {

Metrics summarize(const Trace& trace) {
    if (trace.rows.empty()) throw std::invalid_argument("summarize: empty trace");
    const std::size_t K = trace.num_constraints;
    Metrics m;
    double sum_u = 0.0;
    std::vector<double> sum_p(K, 0.0);
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
        const auto& row = trace.rows[i];
        if (row.t != i) {
            throw std::invalid_argument("summarize: trace must hold every slot from 0 (row " + std::to_string(i) +
                                        " has t = " + std::to_string(row.t) + "); record with stride 1");
        }
        if (row.p.size() != K) throw std::invalid_argument("summarize: row width mismatch");
        sum_u += row.u;
        double max_pbar = K ? -std::numeric_limits<double>::infinity() : 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            sum_p[k] += row.p[k];
            max_pbar = std::max(max_pbar, sum_p[k] / static_cast<double>(i + 1));
        }
        m.max_pbar_series.emplace_back(row.t, max_pbar);
    }
    const double n = static_cast<double>(trace.rows.size());
    m.slots = trace.rows.size();
    m.ubar = sum_u / n;
    m.pbar.resize(K);
    for (std::size_t k = 0; k < K; ++k) m.pbar[k] = sum_p[k] / n;
    return m;
}

void write_trace(const Trace& trace, const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open trace file for writing: " + path.string());
    const std::size_t K = trace.num_constraints;
    std::string header = "t,strategy,u";
    for (std::size_t k = 1; k <= K; ++k) header += ",p_" + std::to_string(k);
    for (std::size_t k = 1; k <= K; ++k) header += ",Q_" + std::to_string(k);
    header += ",ubar";
    for (std::size_t k = 1; k <= K; ++k) header += ",pbar_" + std::to_string(k);
    std::fprintf(f, "%s\n", header.c_str());
    for (const auto& r : trace.rows) {
        std::fprintf(f, "%llu,%lld,%.17g", static_cast<unsigned long long>(r.t), static_cast<long long>(r.strategy), r.u);
        for (double v : r.p) std::fprintf(f, ",%.17g", v);
        for (double v : r.q) std::fprintf(f, ",%.17g", v);
        std::fprintf(f, ",%.17g", r.ubar);
        for (double v : r.pbar) std::fprintf(f, ",%.17g", v);
        std::fputc('\n', f);
    }
    if (std::ferror(f) || std::fclose(f) != 0) throw std::runtime_error("failed writing trace file: " + path.string());
}

Trace read_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace file: " + path.string());

    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    }
    std::size_t K = 0;
    while (K + 3 < cols.size() && cols[3 + K] == "p_" + std::to_string(K + 1)) ++K;
    if (cols.size() != 4 + 3 * K || cols[0] != "t" || cols[1] != "strategy" || cols[2] != "u" ||
        cols[3 + 2 * K] != "ubar") {
        throw std::runtime_error("unrecognized trace header in " + path.string());
    }

    Trace trace;
    trace.num_constraints = K;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) f.push_back(c);
        if (f.size() != cols.size()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(cols.size()) + " fields");
        }
        try {
            TraceRecord r;
            r.t = std::stoull(f[0]);
            r.strategy = std::stoll(f[1]);
            r.u = std::stod(f[2]);
            for (std::size_t k = 0; k < K; ++k) r.p.push_back(std::stod(f[3 + k]));
            for (std::size_t k = 0; k < K; ++k) r.q.push_back(std::stod(f[3 + K + k]));
            r.ubar = std::stod(f[3 + 2 * K]);
            for (std::size_t k = 0; k < K; ++k) r.pbar.push_back(std::stod(f[4 + 2 * K + k]));
            trace.rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": malformed number");
        }
    }
    return trace;
}

}  // namespace corrsched
