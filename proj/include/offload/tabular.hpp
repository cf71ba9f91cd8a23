#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "offload/population.hpp"

namespace offload {

/// Rows `user,slot,value` where value is the cell id the user occupies.
void write_cell_paths(std::ostream& os, const Population& pop);
/// Replaces every user's path. All (user, slot) pairs must be present exactly once.
void read_cell_paths(std::istream& is, Population& pop);

/// Rows `user,deadline_minutes,slot,value` with the contact probability.
void write_contacts(std::ostream& os, const Population& pop);
/// Replaces every user's contact matrix; deadlines must be on the population grid.
void read_contacts(std::istream& is, Population& pop);

/// Rows `slot,cell,value`.
void write_congestion_matrix(std::ostream& os, const Eigen::MatrixXd& price);
Eigen::MatrixXd read_congestion_matrix(std::istream& is, int num_slots, int num_cells);
Eigen::MatrixXd load_congestion_matrix(const std::filesystem::path& path, int num_slots, int num_cells);

}  // namespace offload
