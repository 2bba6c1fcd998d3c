#pragma once

#include <span>
#include <string>

#include "divplan/simulator.hpp"

namespace divplan::svg {

/// Renders a sweep table as a log-x line chart: one polyline per dataset
/// size N, circle markers at the data points, and standard-deviation
/// whiskers where the table carries spread. Output bytes are a pure
/// function of the rows. Errors with "empty_input" on an empty table.
std::string render_sweep_chart(std::span<const SweepRow> rows);

}  // namespace divplan::svg
