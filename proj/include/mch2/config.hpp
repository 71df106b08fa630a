#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mch2/dynamics.hpp"
#include "mch2/experiments.hpp"

namespace mch2 {

// Raised for malformed or invalid configuration text; the message names the line or key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// a cos(m.x) + b sin(m.x)
struct DataTerm {
    int m0 = 0, m1 = 0;
    double a = 0.0, b = 0.0;
};

struct DataSpec {
    enum class Kind { modes, steep, family };
    Kind kind = Kind::modes;
    std::vector<DataTerm> u1, u2, gamma;
    SteepData steep;
    int family_n = 8;
    int family_kappa = 1;
    double scale = 1.0;
};

struct RunConfig {
    SimConfig sim;
    DataSpec data;
    std::uint64_t seed = 1;
    int members = 1;
    double lambda = 0.5;
    bool calibrate_hs = true;
    std::vector<double> scales;
    double winf_factor = 5.0, hs_factor = 5.0;
    // effective value of every key, defaults included, in canonical text form
    std::map<std::string, std::string> effective;
};

// Flat "key = value" lines; '#' starts a comment. Unknown keys, duplicates and bad values
// are rejected with the line number; missing required keys are named.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

State initial_state(const RunConfig& cfg);

// documented keys with their defaults, one per line
std::string config_reference();

}  // namespace mch2
