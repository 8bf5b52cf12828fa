#include "fracstab/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace fracstab::io {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const fode::Trajectory& traj) {
    const int n = traj.states.empty() ? 0 : (int)traj.states.front().size();
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",x_" << i;
    os << "\n";
    const auto nodes = traj.grid.nodes();
    for (std::size_t j = 0; j < traj.states.size(); ++j) {
        os << fmt(nodes[j]);
        for (double v : traj.states[j]) os << ',' << fmt(v);
        os << "\n";
    }
}

void write_trajectory_csv(std::ostream& os, const rdsim::FieldTrajectory& traj) {
    const int n = traj.states.empty() ? 0 : (int)traj.states.front().data.size();
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",x_" << i;
    os << "\n";
    for (std::size_t j = 0; j < traj.states.size(); ++j) {
        os << fmt(traj.times[j]);
        for (double v : traj.states[j].data) os << ',' << fmt(v);
        os << "\n";
    }
}

void write_field_csv(std::ostream& os, const rdsim::EigenBasis& basis, const rdsim::Field& f) {
    const rdsim::Field v = rdsim::to_values(basis, f);
    const bool rect = basis.domain.shape == rdsim::Shape::Rectangle;
    os << (rect ? "x,y" : "x");
    for (int c = 1; c <= v.components; ++c) os << ",component_" << c;
    os << "\n";
    const int Mx = (int)basis.xs.size();
    for (int p = 0; p < basis.points(); ++p) {
        if (rect)
            os << fmt(basis.xs[p % Mx]) << ',' << fmt(basis.ys[p / Mx]);
        else
            os << fmt(basis.xs[p]);
        for (int c = 0; c < v.components; ++c) os << ',' << fmt(v.at(c, p));
        os << "\n";
    }
}

void write_mode_energy_csv(std::ostream& os, const rdsim::FieldTrajectory& traj) {
    const int K = traj.states.empty() ? 0 : traj.states.front().stride();
    os << "t";
    for (int k = 0; k < K; ++k) os << ",E_" << k;
    os << "\n";
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        os << fmt(traj.times[i]);
        for (double e : rdsim::mode_energies(traj.states[i])) os << ',' << fmt(e);
        os << "\n";
    }
}

void write_dispersion_csv(std::ostream& os, const std::vector<double>& mu,
                          const std::vector<double>& max_re) {
    if (mu.size() != max_re.size()) throw DomainError("dispersion columns must have equal length");
    os << "mu,max_re_lambda\n";
    for (std::size_t i = 0; i < mu.size(); ++i) os << fmt(mu[i]) << ',' << fmt(max_re[i]) << "\n";
}

nlohmann::json to_json(const stability::StabilityVerdict& v) {
    nlohmann::json j;
    j["status"] = stability::to_string(v.status);
    j["sector_margin"] = v.sector_margin;
    if (v.witness)
        j["witness"] = {{"re", v.witness->real()}, {"im", v.witness->imag()}};
    else
        j["witness"] = nullptr;
    return j;
}

nlohmann::json to_json(const stability::TuringReport& r) {
    nlohmann::json j;
    j["homogeneous"] = to_json(r.homogeneous_verdict);
    if (r.unstable_mode_window)
        j["window"] = {r.unstable_mode_window->first, r.unstable_mode_window->second};
    else
        j["window"] = nullptr;
    j["witnesses"] = nlohmann::json::array();
    for (const auto& w : r.witnessing_modes)
        j["witnesses"].push_back(
            {{"k", w.k}, {"mu", w.mu}, {"lambda_re", w.lambda.real()}, {"lambda_im", w.lambda.imag()}});
    j["deferred_case"] = r.deferred_case_flag;
    return j;
}

nlohmann::json to_json(const linalg::Spectrum& s) {
    nlohmann::json j;
    j["n"] = s.n;
    j["condition_flag"] =
        s.condition_flag == linalg::ConditionFlag::Diagonalizable ? "diagonalizable" : "near_defective";
    j["eigenvalues"] = nlohmann::json::array();
    for (const auto& l : s.eigenvalues) j["eigenvalues"].push_back({{"re", l.real()}, {"im", l.imag()}});
    return j;
}

TrajectoryTable read_trajectory_csv(std::istream& is) {
    TrajectoryTable tab;
    std::string line;
    if (!std::getline(is, line)) throw DomainError("trajectory file is empty");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ','))
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw DomainError("trajectory file holds a non-numeric cell: " + cell);
            }
        if (vals.empty()) continue;
        tab.times.push_back(vals.front());
        tab.states.emplace_back(vals.begin() + 1, vals.end());
    }
    if (tab.times.empty()) throw DomainError("trajectory file holds no data rows");
    return tab;
}

} // namespace fracstab::io
