#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "bmophi/decomposition.hpp"
#include "bmophi/gauge.hpp"
#include "bmophi/grid.hpp"
#include "bmophi/oscillation.hpp"
#include "bmophi/sht.hpp"

namespace bmo {

using Json = nlohmann::ordered_json;

/// Rows of comma-separated numbers. Errors name the file, line and column.
std::vector<std::vector<double>> read_csv(const std::string& path);
std::vector<std::vector<double>> parse_csv(const std::string& text, const std::string& origin = "<inline>");

/// A single row or column is 1-D; an n x n block is 2-D (row-major).
GridFunction grid_function_from_rows(const std::vector<std::vector<double>>& rows, double side = 1.0);
GridFunction load_grid_function(const std::string& path, double side = 1.0);
/// Inline JSON: a flat array (1-D) or an array of equal-length rows (2-D).
GridFunction grid_function_from_json(const Json& j, double side = 1.0);

CellMeasure load_measure(const std::string& path, const GridDomain& d);

/// 1-D data is written one value per line, 2-D data one row per line.
std::string to_csv(const GridDomain& d, const std::vector<double>& cells);
void write_text(const std::string& path, const std::string& text);

/// Shorthand "id", "power:0.5", "log1p:1", or a JSON object
/// {"kind": "power", "p": 0.5}, {"kind": "polygonal", "vertices": [[0,0],[1,1]], "final_slope": 0.5}.
Gauge parse_gauge(const std::string& spec);
Gauge gauge_from_json(const Json& j);

Json region_json(const Region& r, const GridDomain* d = nullptr);
Json to_json(const NormReport& r, const GridDomain* d = nullptr);
Json to_json(const CZResult& r, const GridDomain& d);
Json to_json(const BesicovitchFamilies& f);
/// Nested {"interval", "mass", "split", "left", "right"} in domain coordinates.
Json to_json(const MuDyadicTree& t, const GridDomain& d);

/// {"points": n, "dist": [[...]], "kappa": k, "weights": [...], "gamma": g}; gamma optional.
FiniteSHT sht_from_json(const Json& j);
FiniteSHT load_sht(const std::string& path);
Json to_json(const FiniteSHT& s);

Json read_json(const std::string& path);

}  // namespace bmo
