#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "poweratom/density_matrix.hpp"
#include "poweratom/errors.hpp"
#include "poweratom/minimizer.hpp"

namespace poweratom {

// nlohmann::json already keeps object keys sorted (std::map), so
// dump() of this alias is the canonical serialization.
using Json = nlohmann::json;

inline std::string canonical_json(const Json& j) { return j.dump(2); }

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(v));
    return buf;
}

// Hash of the canonical (sorted-key) serialization: stable under key
// reordering in the input file.
inline std::string config_hash(const Json& j) {
    return hex64(fnv1a(j.dump()));
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------
// MinimizerConfig <-> JSON

inline Json to_json(const MinimizerConfig& c) {
    return Json{{"Z", c.Z},
                {"N", c.N},
                {"p", c.p},
                {"mode", c.mode == TraceMode::Exact ? "exact" : "at_most"},
                {"L_max", c.L_max},
                {"max_iter", c.max_iter},
                {"step_init", c.step_init},
                {"armijo_c", c.armijo_c},
                {"backtrack_factor", c.backtrack_factor},
                {"tol_residual", c.tol_residual},
                {"seed", c.seed},
                {"n_starts", c.n_starts},
                {"init_perturbation", c.init_perturbation},
                {"grid",
                 {{"spacing", to_string(c.spacing)},
                  {"r_min", c.r_min},
                  {"r_max", c.r_max},
                  {"n", c.grid_n}}}};
}

inline MinimizerConfig config_from_json(const Json& j) {
    MinimizerConfig c;
    try {
        c.Z = j.value("Z", c.Z);
        c.N = j.value("N", c.N);
        c.p = j.value("p", c.p);
        if (j.contains("mode")) {
            const std::string m = j.at("mode").get<std::string>();
            if (m == "exact")
                c.mode = TraceMode::Exact;
            else if (m == "at_most")
                c.mode = TraceMode::AtMost;
            else
                throw ParameterError("config: mode must be exact|at_most");
        }
        c.L_max = j.value("L_max", c.L_max);
        c.max_iter = j.value("max_iter", c.max_iter);
        c.step_init = j.value("step_init", c.step_init);
        c.armijo_c = j.value("armijo_c", c.armijo_c);
        c.backtrack_factor = j.value("backtrack_factor", c.backtrack_factor);
        c.tol_residual = j.value("tol_residual", c.tol_residual);
        c.seed = j.value("seed", c.seed);
        c.n_starts = j.value("n_starts", c.n_starts);
        c.init_perturbation =
            j.value("init_perturbation", c.init_perturbation);
        if (j.contains("grid")) {
            const Json& g = j.at("grid");
            if (g.contains("spacing"))
                c.spacing =
                    spacing_from_string(g.at("spacing").get<std::string>());
            c.r_min = g.value("r_min", c.r_min);
            c.r_max = g.value("r_max", c.r_max);
            c.grid_n = g.value("n", c.grid_n);
        }
    } catch (const Json::exception& e) {
        throw ParameterError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------------
// State checkpoint <-> JSON (round-trips to 1e-12; we serialize with 17
// significant digits so round-trip is exact for doubles).

inline Json state_to_json(const DensityMatrixState& st) {
    Json blocks = Json::array();
    for (const auto& b : st.blocks) {
        Json rows = Json::array();
        for (Eigen::Index i = 0; i < b.G.rows(); ++i) {
            Json row = Json::array();
            for (Eigen::Index j = 0; j < b.G.cols(); ++j)
                row.push_back(b.G(i, j));
            rows.push_back(std::move(row));
        }
        blocks.push_back(Json{{"ell", b.ell}, {"G", std::move(rows)}});
    }
    return Json{{"grid",
                 {{"spacing", to_string(st.grid->kind)},
                  {"r_min", st.grid->r_min},
                  {"r_max", st.grid->r_max},
                  {"n", st.grid->n},
                  {"id", st.grid->id()}}},
                {"blocks", std::move(blocks)}};
}

inline DensityMatrixState state_from_json(const Json& j) {
    try {
        const Json& g = j.at("grid");
        GridPtr grid = std::make_shared<const RadialGrid>(
            build_grid(g.at("r_min").get<double>(),
                       g.at("r_max").get<double>(),
                       g.at("n").get<std::size_t>(),
                       spacing_from_string(g.at("spacing").get<std::string>())));
        if (g.contains("id") && g.at("id").get<std::string>() != grid->id())
            throw ParameterError("state checkpoint: grid id mismatch");
        DensityMatrixState st;
        st.grid = grid;
        for (const Json& bj : j.at("blocks")) {
            ChannelBlock b;
            b.ell = bj.at("ell").get<int>();
            const Json& rows = bj.at("G");
            const auto n = static_cast<Eigen::Index>(rows.size());
            b.G.resize(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index k = 0; k < n; ++k)
                    b.G(i, k) = rows.at(static_cast<std::size_t>(i))
                                    .at(static_cast<std::size_t>(k))
                                    .get<double>();
            st.blocks.push_back(std::move(b));
        }
        return st;
    } catch (const Json::exception& e) {
        throw ParameterError(std::string("state checkpoint: ") + e.what());
    }
}

// ---------------------------------------------------------------------
// CSV writer: fixed header, rows of 17-significant-digit floats or
// verbatim strings.

class CsvWriter {
  public:
    CsvWriter(const std::string& path, std::vector<std::string> header)
        : out_(path), width_(header.size()) {
        if (!out_) throw ParameterError("cannot open for writing: " + path);
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != width_)
            throw ParameterError("CSV row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

    static std::string cell(double v) { return format_double(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(std::uint64_t v) { return std::to_string(v); }
    static std::string cell(bool v) { return v ? "1" : "0"; }

  private:
    std::ofstream out_;
    std::size_t width_;
};

// ---------------------------------------------------------------------
// Run manifest

struct RunManifest {
    std::string subcommand;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string artifact_version = "1";
    std::vector<std::string> outputs;
    double wall_seconds = 0.0;  // excluded from byte-identity comparisons

    Json to_json() const {
        return Json{{"subcommand", subcommand},
                    {"config_hash", config_hash},
                    {"seed", seed},
                    {"artifact_version", artifact_version},
                    {"outputs", outputs},
                    {"wall_seconds", wall_seconds}};
    }
};

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ParameterError("cannot open for writing: " + path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << "\n";
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config: " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParameterError(std::string("config parse: ") + e.what());
    }
}

}  // namespace poweratom
