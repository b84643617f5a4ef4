#pragma once

#include <string>

#include <json.hpp>

#include "qot/states.hpp"
#include "qot/transport.hpp"

namespace qot::io {

using Json = nlohmann::json;

/// {"re": [[..]], "im": [[..]]}
Json matrix_to_json(const CMatrix& m);
/// Accepts a missing "im" as all zeros. Throws Parse on ragged input.
CMatrix matrix_from_json(const Json& j);

/// {"dim": N, "re": [[..]], "im": [[..]]}
Json state_to_json(const DensityMatrix& rho);
/// Throws Parse on malformed JSON, the states errors on invalid matrices.
DensityMatrix state_from_json(const Json& j);
DensityMatrix load_state(const std::string& path);

/// value, gap, iterations, coupling, duals and residuals.
Json solution_to_json(const TransportSolution& s);

/// 12 significant digits, the format used for every CSV number.
std::string number(double x);

}  // namespace qot::io
