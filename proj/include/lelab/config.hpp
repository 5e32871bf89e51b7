#pragma once

#include <map>
#include <string>
#include <vector>

#include "lelab/mesh.hpp"

namespace lelab {

struct PRange {
    double start = 5.0;
    double end = 80.0;
    double factor = 1.15;
};

/// Flat run configuration mirrored one-to-one by CLI flags and the
/// key=value config file.
struct RunConfig {
    std::string domain = "disk";  // disk | square | rect:WxH | polygon:FILE
    double h = 0.02;
    PRange p;
    std::string mode = "nodal";  // nodal | positive | radial-nodal
    double newton_tol = 1e-11;
    double rho = 0.2;    // Pohozaev / local-mass ball radius
    double rho0 = 0.1;   // sign-ball radius
    std::string suite = "all";
    std::string out_dir = "out";
    std::string solutions_dir;  // verify input (defaults to out_dir)
    uint64_t seed = 0;          // sampling-based property tests
    int threads = 1;

    std::map<std::string, std::string> echo() const;
};

DomainSpec parse_domain(const std::string& text);
PRange parse_prange(const std::string& text);
Vec2 parse_point(const std::string& text);

/// key=value file, '#' comments; unknown keys rejected.
void load_config_file(const std::string& path, RunConfig& cfg);
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value);
void validate(const RunConfig& cfg);

}  // namespace lelab
