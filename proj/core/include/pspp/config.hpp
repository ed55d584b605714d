#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pspp/simulate.hpp"

namespace pspp {

// Parsed run configuration.  Sections: [model], [priors], [run], [output];
// matrices are written as bracketed row lists, e.g. [[1,2],[2,5]].
// Defaults here are the documented experiment defaults.
struct RunConfig {
    // [model]
    std::optional<Family> family;
    std::string data;                     // CSV path for filter runs
    std::string mode = "matrix";          // matrix | scalar | known
    std::optional<Matrix> b, c, w, v, z;  // overrides; family supplies B/C/W
    std::optional<Vector> discounts;      // per-component, in (0,1]

    // [priors]
    std::optional<Vector> m0;
    std::optional<Matrix> p0;
    std::optional<Matrix> v0;
    double eta0 = 8.0;
    std::optional<Matrix> k0;
    double alpha = 1.0;
    double nu = 6.0;  // conjugate prior dof (sop-compare)
    double s = 1.0;   // conjugate prior scale (sop-compare)

    // [run]
    int replications = 200;
    int length = 500;
    std::uint64_t seed = 0;
    std::vector<int> snapshots = {100, 200, 500};
    int burn_in = 0;
    std::vector<std::string> models = {"DLM1", "DLM3"};
    int draws = 100000;            // postulate-check
    int bins = 8;                  // postulate-check
    std::string example = "gaussian";  // A | B | C | gaussian
    double dof = 30.0;             // postulate-check law dof
    int cases = 1000;              // sop-compare randomized cases

    // [output]
    std::string path;
    std::string format = "json";  // json | csv | both
};

// Parses and fully validates a config document; every failure carries a
// location.  Referenced data files must exist at parse time.
RunConfig parse_config(const std::string& text);

// Reads the file and parses it.
RunConfig load_config(const std::string& path);

// Canonical text form; parse(serialize(c)) reproduces c exactly.
std::string serialize_config(const RunConfig& cfg);

// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

}  // namespace pspp
