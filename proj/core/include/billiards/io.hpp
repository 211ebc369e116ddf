#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "billiards/billiard.hpp"
#include "billiards/chain.hpp"
#include "billiards/diagnostics.hpp"
#include "billiards/measure.hpp"

namespace billiards {

// Fixed %.17g rendering: round-trips doubles exactly and keeps output files
// byte-stable across runs.
std::string format_double(double value);

// step,s,theta,branch; a leading comment line carries table/params/seed.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record);
// One JSON object per line; the first line is the metadata object.
void write_trajectory_jsonl(std::ostream& out, const TrajectoryRecord& record);

// from_index,to_index,probability
void write_chain_csv(std::ostream& out, const StochasticMatrix& matrix);
// Full chain document: states, matrix, flags, period, stationary weights.
std::string chain_json(const ChainStates& states, const StochasticMatrix& matrix,
                       bool irreducible, int period, const StationaryDist& dist);

// bin_left,bin_right,mass
void write_histogram_csv(std::ostream& out, const AngleHistogram& hist);

struct TraceColumn {
  std::string name;
  std::vector<double> values;
};

// Equal-length columns as plain CSV.
void write_columns_csv(std::ostream& out, std::span<const TraceColumn> columns);

}  // namespace billiards
