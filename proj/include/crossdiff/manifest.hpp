#pragma once

#include <map>
#include <string>
#include <vector>

namespace crossdiff {

// Run manifest: config echo, tolerances, timing, the complete list of files a
// command produced (with content hashes), and an overall hash. Written
// atomically as the last action of a command.
class ManifestWriter {
  public:
    ManifestWriter(std::string command, std::string out_dir);

    void set_config_echo(const std::vector<std::string>& lines);
    void set_tolerance(const std::string& name, double value);
    void set_stat(const std::string& name, double value);
    void set_note(const std::string& name, const std::string& value);
    // Registers a file already written under the output directory.
    void add_output(const std::string& filename);

    // Serializes manifest.json (tmp file + rename).
    void write();

  private:
    std::string command_;
    std::string out_dir_;
    std::vector<std::string> echo_;
    std::map<std::string, double> tolerances_;
    std::map<std::string, double> stats_;
    std::map<std::string, std::string> notes_;
    std::vector<std::string> outputs_;
    double start_time_;
};

std::uint64_t fnv1a64_file(const std::string& path);

}  // namespace crossdiff
