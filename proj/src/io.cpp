#include "lelab/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lelab/errors.hpp"
#include "json.hpp"

namespace lelab {

namespace fs = std::filesystem;

std::string tool_version() { return "lelab 0.1.0"; }

std::string CsvWriter::format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

CsvWriter::CsvWriter(std::string path, std::vector<std::string> columns)
    : path_(std::move(path)), tmp_(path_ + ".tmp") {
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += columns[i];
    }
    buffer_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += format(values[i]);
    }
    buffer_ += '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += values[i];
    }
    buffer_ += '\n';
}

void CsvWriter::close() {
    if (!open_) return;
    open_ = false;
    write_text_atomic(path_, buffer_);
}

CsvWriter::~CsvWriter() {
    try {
        close();
    } catch (...) {
    }
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw ArtifactError("cannot write " + tmp);
        os << content;
    }
    fs::rename(tmp, path);
}

uint64_t fnv1a_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ArtifactError("missing artifact " + path);
    uint64_t h = 1469598103934665603ull;
    char buf[1 << 14];
    while (is) {
        is.read(buf, sizeof(buf));
        for (std::streamsize i = 0; i < is.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

void RunManifest::add_artifact(const std::string& path) { artifacts[path] = fnv1a_file(path); }

void RunManifest::save(const std::string& path) const {
    nlohmann::json j;
    j["config"] = config;
    j["tool_version"] = tool_version;
    auto& arts = j["artifacts"] = nlohmann::json::object();
    for (const auto& [p, h] : artifacts) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
        arts[p] = buf;
    }
    j["stage_seconds"] = stage_seconds;
    write_text_atomic(path, j.dump(1) + "\n");
}

RunManifest RunManifest::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ArtifactError("missing manifest " + path);
    nlohmann::json j;
    is >> j;
    RunManifest m;
    m.config = j.value("config", std::map<std::string, std::string>{});
    m.tool_version = j.value("tool_version", "");
    m.stage_seconds = j.value("stage_seconds", std::map<std::string, double>{});
    for (auto& [p, hx] : j.at("artifacts").items())
        m.artifacts[p] = std::stoull(hx.get<std::string>(), nullptr, 16);
    return m;
}

void RunManifest::verify_artifacts(const std::string& base_dir) const {
    for (const auto& [p, h] : artifacts) {
        const std::string full = base_dir.empty() ? p : base_dir + "/" + p;
        if (!fs::exists(full)) throw ArtifactError("missing artifact " + full);
        if (fnv1a_file(full) != h) throw ArtifactError("artifact hash mismatch: " + full);
    }
}

void save_solution(const Solution& sol, uint64_t mesh_hash, const std::string& path) {
    nlohmann::json j;
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, mesh_hash);
    j["mesh_hash"] = buf;
    j["p"] = sol.p;
    j["values"] = sol.field.values;
    j["residual"] = sol.residual_norm;
    j["newton_iters"] = sol.newton_iters;
    j["energy"] = sol.energy;
    j["mass"] = sol.mass;
    j["max_pos"] = sol.max_pos;
    j["max_neg"] = sol.max_neg;
    write_text_atomic(path, j.dump(0) + "\n");
}

Solution load_solution(const std::shared_ptr<const Mesh>& mesh, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ArtifactError("missing solution dump " + path);
    nlohmann::json j;
    is >> j;
    Solution sol;
    sol.mesh = mesh;
    sol.p = j.at("p").get<double>();
    sol.field.values = j.at("values").get<std::vector<double>>();
    if (mesh && sol.field.size() != mesh->num_vertices())
        throw ArtifactError("solution dump does not match the mesh: " + path);
    sol.residual_norm = j.value("residual", 0.0);
    sol.newton_iters = j.value("newton_iters", 0);
    sol.energy = j.at("energy").get<double>();
    sol.mass = j.at("mass").get<double>();
    sol.max_pos = j.value("max_pos", 0.0);
    sol.max_neg = j.value("max_neg", 0.0);
    return sol;
}

void save_radial_profile_csv(const RadialProfile& prof, const std::string& path,
                             const std::string& params) {
    std::string out = "# " + prof.name + (params.empty() ? "" : " " + params) + "\n";
    out += "r,value,derivative\n";
    for (size_t i = 0; i < prof.radii.size(); ++i) {
        out += CsvWriter::format(prof.radii[i]);
        out += ',';
        out += CsvWriter::format(prof.values[i]);
        out += ',';
        out += CsvWriter::format(prof.derivatives[i]);
        out += '\n';
    }
    write_text_atomic(path, out);
}

}  // namespace lelab
