#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gnls/forward.hpp"
#include "gnls/hierarchy.hpp"
#include "gnls/inversion.hpp"

namespace gnls::io {

// Comma-separated tables with a header row. Lines starting with '#' carry metadata.
// Numbers are written with 17 significant digits so files round-trip exactly.

std::string format_double(double v);

void write_sweep(std::ostream& os, const ScatteringSweep& sweep);
/// Throws ContractError naming the offending line.
ScatteringSweep read_sweep(std::istream& is);

void write_series(std::ostream& os, const SeriesCoefficients& series);
SeriesCoefficients read_series(std::istream& is);

/// Extra "# key=value" lines placed ahead of the table.
using Metadata = std::vector<std::pair<std::string, std::string>>;

void write_reconstruction(std::ostream& os, const ReconstructionResult& result, const Metadata& extra = {});

/// Generic CSV with a header row; every row must match the header width.
void write_columns(std::ostream& os, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns, const Metadata& meta = {});

}  // namespace gnls::io
