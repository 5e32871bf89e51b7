#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lelab/profiles.hpp"
#include "lelab/solver.hpp"

namespace lelab {

/// Deterministic CSV writer: '.' decimal, LF newlines, %.12g values,
/// atomic tmp+rename publication.
class CsvWriter {
  public:
    CsvWriter(std::string path, std::vector<std::string> columns);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);
    void close();  // atomically publish
    ~CsvWriter();

    static std::string format(double v);

  private:
    std::string path_, tmp_;
    std::string buffer_;
    bool open_ = true;
};

uint64_t fnv1a_file(const std::string& path);

void write_text_atomic(const std::string& path, const std::string& content);

/// {config echo, artifact hashes, tool version, wall-clock per stage}
struct RunManifest {
    std::map<std::string, std::string> config;
    std::map<std::string, uint64_t> artifacts;  // path -> hash
    std::map<std::string, double> stage_seconds;
    std::string tool_version;

    void add_artifact(const std::string& path);
    void save(const std::string& path) const;
    static RunManifest load(const std::string& path);
    /// Throws ArtifactError naming the first missing or hash-mismatched file.
    void verify_artifacts(const std::string& base_dir) const;
};

void save_solution(const Solution& sol, uint64_t mesh_hash, const std::string& path);
Solution load_solution(const std::shared_ptr<const Mesh>& mesh, const std::string& path);

void save_radial_profile_csv(const RadialProfile& prof, const std::string& path,
                             const std::string& params);

std::string tool_version();

}  // namespace lelab
