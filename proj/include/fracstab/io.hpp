#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracstab/fode.hpp"
#include "fracstab/linalg.hpp"
#include "fracstab/rdsim.hpp"
#include "fracstab/stability.hpp"

namespace fracstab::io {

// fixed 17-significant-digit formatting; all writers use it so identical runs
// produce byte-identical files
std::string fmt(double x);

// rows "t,x_1,...,x_n"
void write_trajectory_csv(std::ostream& os, const fode::Trajectory& traj);

// same layout with the coefficient vector flattened component-major
void write_trajectory_csv(std::ostream& os, const rdsim::FieldTrajectory& traj);

// one snapshot: rows "x[,y],component_1,...,component_n" on the collocation grid
void write_field_csv(std::ostream& os, const rdsim::EigenBasis& basis, const rdsim::Field& f);

// rows "t,E_0,...,E_{K-1}" (per-mode energies summed over components)
void write_mode_energy_csv(std::ostream& os, const rdsim::FieldTrajectory& traj);

// rows "mu,max_re_lambda" (dispersion relation samples)
void write_dispersion_csv(std::ostream& os, const std::vector<double>& mu,
                          const std::vector<double>& max_re);

nlohmann::json to_json(const stability::StabilityVerdict& v);
nlohmann::json to_json(const stability::TuringReport& r);
nlohmann::json to_json(const linalg::Spectrum& s);

// parsed back form of write_trajectory_csv output
struct TrajectoryTable {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
};
TrajectoryTable read_trajectory_csv(std::istream& is);

} // namespace fracstab::io
