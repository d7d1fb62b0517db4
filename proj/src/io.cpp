#include "srf/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "srf/errors.hpp"

namespace srf {

std::string format_hex(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double parse_hex(const std::string& s) {
    return std::strtod(s.c_str(), nullptr);
}

void save_trajectory(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    const ModelSpec& m = *traj.model;
    out << "# srf-trajectory v1\n";
    out << "model.family " << (m.family == Family::Round ? "Round" : "Weighted") << "\n";
    out << "model.a " << format_hex(m.a) << "\n";
    out << "model.b " << format_hex(m.b) << "\n";
    out << "grid.n " << m.grid->n() << "\n";
    out << "kappa " << format_hex(m.kappa) << "\n";
    out << "kind " << (traj.kind == FlowKind::Normalized ? "normalized" : "unnormalized") << "\n";
    out << "dt " << format_hex(traj.dt()) << "\n";
    out << "states " << traj.states.size() << "\n";
    for (const FlowState& st : traj.states) {
        out << format_hex(st.t);
        for (double v : st.phi.values) out << " " << format_hex(v);
        for (double v : st.u.values) out << " " << format_hex(v);
        out << "\n";
    }
}

Trajectory load_trajectory(const Calculus& calc, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(in, line);
    if (line.rfind("# srf-trajectory", 0) != 0)
        throw std::runtime_error("not a trajectory file: " + path);
    size_t n_states = 0;
    int grid_n = 0;
    std::string kind = "normalized";
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "states") { ls >> n_states; break; }
        if (key == "grid.n") ls >> grid_n;
        if (key == "kind") ls >> kind;
    }
    if (grid_n != calc.grid()->n())
        throw std::runtime_error("grid size mismatch in " + path);
    Trajectory traj;
    traj.kind = (kind == "normalized") ? FlowKind::Normalized : FlowKind::Unnormalized;
    traj.model = &calc.model();
    const size_t n = static_cast<size_t>(grid_n);
    for (size_t k = 0; k < n_states; ++k) {
        if (!std::getline(in, line))
            throw std::runtime_error("truncated trajectory file: " + path);
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        FlowState st;
        st.t = parse_hex(tok);
        Profile phi(n), u(n);
        for (size_t i = 0; i < n; ++i) { ls >> tok; phi[i] = parse_hex(tok); }
        for (size_t i = 0; i < n; ++i) { ls >> tok; u[i] = parse_hex(tok); }
        st.phi = BasicField(calc.grid(), std::move(phi));
        st.u = BasicField(calc.grid(), std::move(u));
        st.gT = calc.metric_from_potential(st.phi);
        st.curv = calc.curvature(st.gT);
        traj.states.push_back(std::move(st));
    }
    return traj;
}

void save_dilaton_path(const DilatonPath& path, const Trajectory& traj,
                       const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file);
    out << "# srf-dilaton v1\n";
    out << "variant " << (path.variant == ConjugateVariant::Energy ? "F" : "W") << "\n";
    out << "states " << path.fields.size() << "\n";
    for (size_t k = 0; k < path.fields.size(); ++k) {
        out << format_hex(traj.states[k].t);
        if (path.variant == ConjugateVariant::Entropy) out << " " << format_hex(path.tau[k]);
        for (double v : path.fields[k].values) out << " " << format_hex(v);
        out << "\n";
    }
}

DilatonPath load_dilaton_path(const Calculus& calc, const Trajectory& traj,
                              const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file);
    std::string line;
    std::getline(in, line);
    if (line.rfind("# srf-dilaton", 0) != 0)
        throw std::runtime_error("not a dilaton file: " + file);
    DilatonPath path;
    path.trajectory = &traj;
    size_t n_states = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "variant") {
            std::string v;
            ls >> v;
            path.variant = (v == "W") ? ConjugateVariant::Entropy : ConjugateVariant::Energy;
        }
        if (key == "states") { ls >> n_states; break; }
    }
    const size_t n = static_cast<size_t>(calc.grid()->n());
    for (size_t k = 0; k < n_states; ++k) {
        if (!std::getline(in, line))
            throw std::runtime_error("truncated dilaton file: " + file);
        std::istringstream ls(line);
        std::string tok;
        ls >> tok; // t, implied by alignment
        if (path.variant == ConjugateVariant::Entropy) {
            ls >> tok;
            path.tau.push_back(parse_hex(tok));
        }
        Profile f(n);
        for (size_t i = 0; i < n; ++i) { ls >> tok; f[i] = parse_hex(tok); }
        path.fields.emplace_back(calc.grid(), std::move(f));
    }
    if (path.fields.size() != traj.states.size())
        throw RangeExceeded("dilaton path rows do not match the trajectory");
    return path;
}

} // namespace srf
