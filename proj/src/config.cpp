#include "lelab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lelab/errors.hpp"

namespace lelab {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(item);
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("cannot parse " + what + " from '" + s + "'");
    }
}

}  // namespace

DomainSpec parse_domain(const std::string& text) {
    if (text == "disk" || text == "unit-disk") return DomainSpec::unit_disk();
    if (text == "square") return DomainSpec::rectangle(1.0, 1.0);
    if (text.rfind("rect:", 0) == 0) {
        auto parts = split(text.substr(5), 'x');
        if (parts.size() != 2) throw UsageError("rectangle wants rect:WxH");
        return DomainSpec::rectangle(to_double(parts[0], "width"), to_double(parts[1], "height"));
    }
    if (text.rfind("polygon:", 0) == 0) {
        std::ifstream is(text.substr(8));
        if (!is) throw ArtifactError("cannot read polygon file " + text.substr(8));
        std::vector<Vec2> vs;
        double x, y;
        while (is >> x >> y) vs.push_back({x, y});
        return DomainSpec::polygon(vs);
    }
    throw UsageError("unknown domain '" + text + "' (disk | square | rect:WxH | polygon:FILE)");
}

PRange parse_prange(const std::string& text) {
    auto parts = split(text, ':');
    PRange pr;
    if (parts.size() == 1) {
        pr.start = pr.end = to_double(parts[0], "p");
    } else if (parts.size() == 2 || parts.size() == 3) {
        pr.start = to_double(parts[0], "p start");
        pr.end = to_double(parts[1], "p end");
        if (parts.size() == 3) pr.factor = to_double(parts[2], "p factor");
    } else {
        throw UsageError("p-range wants start:end:factor");
    }
    return pr;
}

Vec2 parse_point(const std::string& text) {
    auto parts = split(text, ',');
    if (parts.size() != 2) throw UsageError("point wants x,y");
    return {to_double(parts[0], "x"), to_double(parts[1], "y")};
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "domain") cfg.domain = value;
    else if (key == "h") cfg.h = to_double(value, "h");
    else if (key == "p") cfg.p = parse_prange(value);
    else if (key == "mode") cfg.mode = value;
    else if (key == "newton_tol") cfg.newton_tol = to_double(value, "newton_tol");
    else if (key == "rho") cfg.rho = to_double(value, "rho");
    else if (key == "rho0") cfg.rho0 = to_double(value, "rho0");
    else if (key == "suite") cfg.suite = value;
    else if (key == "out") cfg.out_dir = value;
    else if (key == "solutions") cfg.solutions_dir = value;
    else if (key == "seed") cfg.seed = static_cast<uint64_t>(std::stoull(value));
    else if (key == "threads") cfg.threads = static_cast<int>(std::stol(value));
    else throw UsageError("unknown config key '" + key + "'");
}

void load_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream is(path);
    if (!is) throw ArtifactError("cannot read config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        // trim
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << path << ":" << lineno << ": expected key=value";
            throw UsageError(os.str());
        }
        apply_key(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
}

void validate(const RunConfig& cfg) {
    if (cfg.h <= 0) throw UsageError("mesh size h must be positive");
    if (cfg.p.start <= 1.0)
        throw UsageError("p-range start must satisfy the precondition p > 1");
    if (cfg.p.end < cfg.p.start) throw UsageError("p-range end must be >= start");
    if (cfg.p.factor <= 1.0) throw UsageError("p-range factor must exceed 1");
    if (cfg.newton_tol <= 0 || cfg.rho <= 0 || cfg.rho0 <= 0)
        throw UsageError("tolerances and radii must be positive");
    if (cfg.mode != "nodal" && cfg.mode != "positive" && cfg.mode != "radial-nodal")
        throw UsageError("mode must be nodal | positive | radial-nodal");
    (void)parse_domain(cfg.domain);
}

std::map<std::string, std::string> RunConfig::echo() const {
    std::ostringstream pr;
    pr << p.start << ":" << p.end << ":" << p.factor;
    auto fmt = [](double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    };
    return {{"domain", domain},       {"h", fmt(h)},
            {"p", pr.str()},          {"mode", mode},
            {"newton_tol", fmt(newton_tol)}, {"rho", fmt(rho)},
            {"rho0", fmt(rho0)},      {"suite", suite},
            {"out", out_dir},         {"solutions", solutions_dir},
            {"seed", std::to_string(seed)}, {"threads", std::to_string(threads)}};
}

}  // namespace lelab
