#include "offload/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "offload/errors.hpp"
#include "offload/market.hpp"

namespace offload {

namespace {

// Parses numeric CSV rows with a fixed column count; the first line is a header.
class RowReader {
 public:
  RowReader(std::istream& is, std::vector<std::string> header) : is_(is), header_(std::move(header)) {
    std::string line;
    if (!std::getline(is_, line)) throw ConfigError("empty table, expected header " + joined());
    trim(line);
    if (line != joined()) throw ConfigError("table header '" + line + "' does not match " + joined());
  }

  bool next(std::vector<double>& row) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      trim(line);
      if (line.empty()) continue;
      row.clear();
      std::size_t start = 0;
      while (true) {
        const auto pos = line.find(',', start);
        const std::string_view cell(line.data() + start, (pos == std::string::npos ? line.size() : pos) - start);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size())
          throw ConfigError("line " + std::to_string(line_no_ + 1) + ": not a number '" + std::string(cell) + "'");
        row.push_back(v);
        if (pos == std::string::npos) break;
        start = pos + 1;
      }
      if (row.size() != header_.size())
        throw ConfigError("line " + std::to_string(line_no_ + 1) + ": expected " + std::to_string(header_.size()) +
                          " columns");
      return true;
    }
    return false;
  }

  int line() const { return line_no_ + 1; }

 private:
  static void trim(std::string& s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  }
  std::string joined() const {
    std::string out;
    for (const auto& h : header_) out += (out.empty() ? "" : ",") + h;
    return out;
  }

  std::istream& is_;
  std::vector<std::string> header_;
  int line_no_ = 0;
};

int as_index(double v, int limit, const char* what, int line) {
  if (v != std::floor(v) || v < 0 || v >= limit)
    throw ConfigError("line " + std::to_string(line) + ": " + what + " " + format_number(v) + " out of range [0," +
                      std::to_string(limit) + ")");
  return static_cast<int>(v);
}

}  // namespace

void write_cell_paths(std::ostream& os, const Population& pop) {
  os << "user,slot,value\n";
  for (std::size_t i = 0; i < pop.users.size(); ++i) {
    const auto& path = pop.users[i].cell_path;
    for (Eigen::Index t = 0; t < path.size(); ++t) os << i << ',' << t << ',' << path(t) << '\n';
  }
}

void read_cell_paths(std::istream& is, Population& pop) {
  const int n = static_cast<int>(pop.users.size()), T = pop.config.num_slots;
  Eigen::MatrixXi paths = Eigen::MatrixXi::Constant(n, T, -1);
  RowReader reader(is, {"user", "slot", "value"});
  std::vector<double> row;
  while (reader.next(row)) {
    const int i = as_index(row[0], n, "user", reader.line());
    const int t = as_index(row[1], T, "slot", reader.line());
    const int s = as_index(row[2], pop.config.num_cells, "cell", reader.line());
    if (paths(i, t) >= 0) throw ConfigError("line " + std::to_string(reader.line()) + ": duplicate (user, slot)");
    paths(i, t) = s;
  }
  if ((paths.array() < 0).any()) throw ConfigError("cell path table does not cover every (user, slot)");
  for (int i = 0; i < n; ++i) pop.users[static_cast<std::size_t>(i)].cell_path = paths.row(i).transpose();
}

void write_contacts(std::ostream& os, const Population& pop) {
  os << "user,deadline_minutes,slot,value\n";
  for (std::size_t i = 0; i < pop.users.size(); ++i) {
    const auto& e = pop.users[i].wifi_contact;
    for (Eigen::Index d = 0; d < e.rows(); ++d) {
      for (Eigen::Index t = 0; t < e.cols(); ++t)
        os << i << ',' << pop.deadline_grid[static_cast<std::size_t>(d)] << ',' << t << ',' << format_number(e(d, t))
           << '\n';
    }
  }
}

void read_contacts(std::istream& is, Population& pop) {
  const int n = static_cast<int>(pop.users.size()), T = pop.config.num_slots;
  const int D = static_cast<int>(pop.deadline_grid.size());
  std::vector<Eigen::MatrixXd> e(static_cast<std::size_t>(n), Eigen::MatrixXd::Constant(D, T, -1.0));
  RowReader reader(is, {"user", "deadline_minutes", "slot", "value"});
  std::vector<double> row;
  while (reader.next(row)) {
    const int i = as_index(row[0], n, "user", reader.line());
    const auto it = std::find(pop.deadline_grid.begin(), pop.deadline_grid.end(), static_cast<int>(row[1]));
    if (it == pop.deadline_grid.end() || row[1] != std::floor(row[1]))
      throw ConfigError("line " + std::to_string(reader.line()) + ": deadline not on the grid");
    const auto d = it - pop.deadline_grid.begin();
    const int t = as_index(row[2], T, "slot", reader.line());
    if (!(row[3] >= 0.0 && row[3] <= 1.0))
      throw ConfigError("line " + std::to_string(reader.line()) + ": contact probability outside [0,1]");
    auto& cell = e[static_cast<std::size_t>(i)](d, t);
    if (cell >= 0.0) throw ConfigError("line " + std::to_string(reader.line()) + ": duplicate entry");
    cell = row[3];
  }
  for (int i = 0; i < n; ++i) {
    const auto& m = e[static_cast<std::size_t>(i)];
    if ((m.array() < 0.0).any()) throw ConfigError("contact table does not cover user " + std::to_string(i));
    for (int d = 1; d < D; ++d) {
      if ((m.row(d).array() < m.row(d - 1).array()).any())
        throw ConfigError("contact probability decreases with deadline for user " + std::to_string(i));
    }
  }
  for (int i = 0; i < n; ++i) pop.users[static_cast<std::size_t>(i)].wifi_contact = e[static_cast<std::size_t>(i)];
}

void write_congestion_matrix(std::ostream& os, const Eigen::MatrixXd& price) {
  os << "slot,cell,value\n";
  for (Eigen::Index t = 0; t < price.rows(); ++t) {
    for (Eigen::Index s = 0; s < price.cols(); ++s) os << t << ',' << s << ',' << format_number(price(t, s)) << '\n';
  }
}

Eigen::MatrixXd read_congestion_matrix(std::istream& is, int num_slots, int num_cells) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(num_slots, num_cells, -1.0);
  RowReader reader(is, {"slot", "cell", "value"});
  std::vector<double> row;
  while (reader.next(row)) {
    const int t = as_index(row[0], num_slots, "slot", reader.line());
    const int s = as_index(row[1], num_cells, "cell", reader.line());
    if (!(row[2] >= 0.0)) throw ConfigError("line " + std::to_string(reader.line()) + ": negative price");
    if (m(t, s) >= 0.0) throw ConfigError("line " + std::to_string(reader.line()) + ": duplicate (slot, cell)");
    m(t, s) = row[2];
  }
  if ((m.array() < 0.0).any()) throw ConfigError("congestion matrix table does not cover every (slot, cell)");
  return m;
}

Eigen::MatrixXd load_congestion_matrix(const std::filesystem::path& path, int num_slots, int num_cells) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open congestion matrix file " + path.string());
  return read_congestion_matrix(in, num_slots, num_cells);
}

}  // namespace offload
