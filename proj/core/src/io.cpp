#include "billiards/io.hpp"

#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

#include "billiards/errors.hpp"

namespace billiards {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

nlohmann::json params_json(const FeresParams& params) {
  nlohmann::json j{{"alpha", params.alpha}};
  if (params.rational) {
    j["alpha_fraction"] = std::to_string(params.rational->num) + "/" +
                          std::to_string(params.rational->den);
  }
  return j;
}

nlohmann::json record_metadata(const TrajectoryRecord& record) {
  nlohmann::json meta{
      {"surface", to_string(record.table.kind)},
      {"r0", record.table.r0},
      {"alpha", record.params.alpha},
      {"s0", record.initial.s},
      {"theta0", record.initial.theta},
      {"steps", record.steps.size()},
  };
  if (record.params.rational) {
    meta["alpha_fraction"] = std::to_string(record.params.rational->num) + "/" +
                             std::to_string(record.params.rational->den);
  }
  if (record.seed) meta["seed"] = *record.seed;
  if (record.word) meta["word"] = *record.word;
  return meta;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record) {
  out << "# " << record_metadata(record).dump() << "\n";
  out << "step,s,theta,branch\n";
  out << "0," << format_double(record.initial.s) << ","
      << format_double(record.initial.theta) << ",0\n";
  for (std::size_t k = 0; k < record.steps.size(); ++k) {
    const auto& step = record.steps[k];
    out << (k + 1) << "," << format_double(step.s) << ","
        << format_double(step.theta) << "," << step.branch << "\n";
  }
}

void write_trajectory_jsonl(std::ostream& out, const TrajectoryRecord& record) {
  out << record_metadata(record).dump() << "\n";
  nlohmann::json first{{"step", 0},
                       {"s", record.initial.s},
                       {"theta", record.initial.theta},
                       {"branch", 0}};
  out << first.dump() << "\n";
  for (std::size_t k = 0; k < record.steps.size(); ++k) {
    const auto& step = record.steps[k];
    nlohmann::json line{{"step", k + 1},
                        {"s", step.s},
                        {"theta", step.theta},
                        {"branch", step.branch}};
    out << line.dump() << "\n";
  }
}

void write_chain_csv(std::ostream& out, const StochasticMatrix& matrix) {
  out << "from_index,to_index,probability\n";
  for (std::size_t i = 0; i < matrix.n; ++i) {
    for (const auto& [col, p] : matrix.rows[i]) {
      out << i << "," << col << "," << format_double(p) << "\n";
    }
  }
}

std::string chain_json(const ChainStates& states, const StochasticMatrix& matrix,
                       bool irreducible, int period, const StationaryDist& dist) {
  nlohmann::json doc;
  doc["theta0"] = states.theta0;
  if (states.rational) {
    doc["alpha_fraction"] = std::to_string(states.rational->num) + "/" +
                            std::to_string(states.rational->den);
  }
  doc["states"] = states.angles;
  if (!states.lattice.empty()) {
    nlohmann::json lattice = nlohmann::json::array();
    for (const auto& coord : states.lattice) {
      lattice.push_back({{"sign", coord.sign}, {"units", coord.units}});
    }
    doc["lattice"] = lattice;
  }
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < matrix.n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& [col, p] : matrix.rows[i]) {
      row.push_back({{"to", col}, {"p", p}});
    }
    rows.push_back(row);
  }
  doc["matrix"] = rows;
  doc["irreducible"] = irreducible;
  doc["period"] = period;
  doc["stationary"] = dist.weights;
  doc["stationary_residual"] = stationary_residual(dist, matrix);
  return doc.dump(2);
}

void write_histogram_csv(std::ostream& out, const AngleHistogram& hist) {
  out << "bin_left,bin_right,mass\n";
  const double width = hist.bin_width();
  for (std::size_t j = 0; j < hist.bins; ++j) {
    out << format_double(j * width) << "," << format_double((j + 1) * width) << ","
        << format_double(hist.mass[j]) << "\n";
  }
}

void write_columns_csv(std::ostream& out, std::span<const TraceColumn> columns) {
  require(!columns.empty(), errc::invalid_argument, "no columns to write");
  const std::size_t rows = columns.front().values.size();
  for (const auto& column : columns) {
    require(column.values.size() == rows, errc::bin_mismatch,
            "trace columns have unequal lengths");
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << (i ? "," : "") << columns[i].name;
  }
  out << "\n";
  for (std::size_t row = 0; row < rows; ++row) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      out << (i ? "," : "") << format_double(columns[i].values[row]);
    }
    out << "\n";
  }
}

}  // namespace billiards
